#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phidiv/deformed_exp.hpp"
#include "phidiv/divergence.hpp"
#include "phidiv/errors.hpp"
#include "phidiv/family.hpp"
#include "phidiv/properties.hpp"
#include "phidiv/simplex.hpp"

using nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

// Exit codes: 0 check passed or value computed, 2 check failed, 1 usage or
// domain error. Inconclusive maps to 0; the verdict string disambiguates.
int verdict_exit(phidiv::Verdict v) {
  return v == phidiv::Verdict::Fail ? 2 : 0;
}

std::vector<double> parse_numbers(const std::string& text) {
  auto try_split = [](const std::string& s, std::vector<double>& out) {
    out.clear();
    std::size_t pos = 0;
    while (pos < s.size()) {
      std::size_t next = s.find(',', pos);
      std::string tok = s.substr(pos, next == std::string::npos ? next : next - pos);
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        return false;
      }
      while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
      if (used != tok.size()) return false;
      out.push_back(v);
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    return !out.empty();
  };

  std::vector<double> vals;
  if (try_split(text, vals)) return vals;

  std::ifstream in(text);
  if (!in) {
    throw phidiv::DomainError("cannot parse '" + text +
                              "' as a number list or open it as a file");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  std::string body = ss.str();
  for (char& ch : body) {
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '\t') ch = ' ';
  }
  std::istringstream toks(body);
  vals.clear();
  double v;
  while (toks >> v) vals.push_back(v);
  if (vals.empty()) throw phidiv::DomainError("file '" + text + "' holds no numbers");
  return vals;
}

ordered_json grid_json(const phidiv::GridMeta& g) {
  return {{"grid_n", g.grid_n}, {"delta", g.delta}, {"samples", g.samples}};
}

ordered_json report_json(const phidiv::CheckReport& r) {
  return {{"verdict", phidiv::to_string(r.verdict)},
          {"worst_margin", r.worst_margin},
          {"strict", r.strict},
          {"witness", r.witness},
          {"grid", grid_json(r.grid)},
          {"seed", r.seed}};
}

struct Common {
  std::string phi;
  std::string out_path;
  bool quiet = false;  // suppresses progress notes on stderr; output is unaffected
};

int emit_text(const Common& common, std::ostream& os, const std::string& text, int code) {
  if (!common.out_path.empty()) {
    std::ofstream f(common.out_path);
    if (!f) {
      std::cerr << "error: cannot open " << common.out_path << " for writing\n";
      return 1;
    }
    f << text;
  }
  os << text;
  return code;
}

int emit(const Common& common, std::ostream& os, ordered_json payload, int code) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  for (auto& [key, value] : payload.items()) doc[key] = std::move(value);
  std::string text = doc.dump(2);
  text.push_back('\n');
  return emit_text(common, os, text, code);
}

int run_args(const std::vector<std::string>& args, std::ostream& os, bool allow_batch);

int run_batch(const Common& common, const std::string& file, std::ostream& os) {
  std::ifstream fin;
  std::istream* in = &std::cin;
  if (file != "-") {
    fin.open(file);
    if (!fin) {
      std::cerr << "error: cannot open batch file " << file << "\n";
      return 1;
    }
    in = &fin;
  }
  ordered_json runs = ordered_json::array();
  int n_pass = 0, n_fail = 0, n_error = 0;
  std::string line;
  long long lineno = 0;
  while (std::getline(*in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ordered_json rec;
    rec["line"] = lineno;
    ordered_json req = ordered_json::parse(line, nullptr, false);
    if (req.is_discarded() || !req.contains("args") || !req["args"].is_array()) {
      rec["error"] = "line is not a JSON object of the form {\"args\": [...]}";
      ++n_error;
      runs.push_back(std::move(rec));
      continue;
    }
    std::vector<std::string> sub;
    for (const auto& a : req["args"]) {
      sub.push_back(a.is_string() ? a.get<std::string>() : a.dump());
    }
    std::ostringstream cap;
    int code = run_args(sub, cap, false);
    rec["args"] = req["args"];
    rec["exit"] = code;
    ordered_json parsed = ordered_json::parse(cap.str(), nullptr, false);
    rec["output"] = parsed.is_discarded() ? ordered_json(cap.str()) : parsed;
    if (code == 2) {
      ++n_fail;
    } else if (code == 0) {
      ++n_pass;
    } else {
      ++n_error;
    }
    runs.push_back(std::move(rec));
  }
  int code = n_fail > 0 ? 2 : (n_error > 0 ? 1 : 0);
  return emit(common, os,
              {{"command", "batch"},
               {"runs", runs},
               {"counts", {{"pass", n_pass}, {"fail", n_fail}, {"error", n_error}}}},
              code);
}

int run_args(const std::vector<std::string>& args, std::ostream& os, bool allow_batch) {
  CLI::App app{"Deformed-exponential divergences on the probability simplex"};
  app.require_subcommand(1);

  Common common;
  app.add_option("--out", common.out_path, "Also write the output document to this file");
  app.add_flag("--quiet", common.quiet, "Suppress progress notes on standard error");

  auto add_phi = [&common](CLI::App* sub) {
    sub->add_option("--phi", common.phi,
                    "Deformation: exp | qexp:<q> | affq:<q>,<b>,<a> | table:<csv>")
        ->required();
    sub->fallthrough();
  };

  // div
  std::string p_str, q_str;
  bool want_terms = false;
  CLI::App* div = app.add_subcommand("div", "Divergence between two distributions");
  add_phi(div);
  div->add_option("--p", p_str, "Left distribution: comma-separated weights or a file")
      ->required();
  div->add_option("--q", q_str, "Right distribution")->required();
  div->add_flag("--terms", want_terms, "Include the per-coordinate contributions");

  // family normalize
  std::string u_str, u0_str;
  CLI::App* family = app.add_subcommand("family", "Deformed exponential family operations");
  family->require_subcommand(1);
  family->fallthrough();
  CLI::App* normalize =
      family->add_subcommand("normalize", "Project a direction and solve the normalizer");
  add_phi(normalize);
  normalize->add_option("--p", p_str, "Base distribution")->required();
  normalize->add_option("--u", u_str, "Direction; projected onto the tangent space first")
      ->required();
  normalize->add_option("--u0", u0_str, "Reference measure (default uniform)");

  // check subcommands
  int grid_n = 200;
  int part_n = 4, part_trials = 200;
  int conv_n = 3, conv_trials = 200;
  int pin_n = 2, pin_trials = 1000;
  int char_n = 0;
  double delta = 1e-4;
  std::uint64_t seed = 0;
  std::string lambdas_str = "0.25,0.5,0.75";
  std::string c_str = "auto";

  CLI::App* check = app.add_subcommand("check", "Structural property checks");
  check->require_subcommand(1);
  check->fallthrough();

  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--grid", grid_n, "Grid points per axis");
    sub->add_option("--delta", delta, "Distance kept from the boundary");
  };
  auto add_sampled = [&seed](CLI::App* sub, int& n_var, int& trials_var) {
    sub->add_option("--n", n_var, "Distribution dimension");
    sub->add_option("--trials", trials_var, "Sampled trials");
    sub->add_option("--seed", seed, "Generator seed");
  };

  CLI::App* superadd = check->add_subcommand("superadd", "g(x+y) >= g(x) + g(y)");
  add_phi(superadd);
  add_grid(superadd);

  CLI::App* concave = check->add_subcommand("concave", "Midpoint concavity of g");
  add_phi(concave);
  add_grid(concave);

  CLI::App* partition =
      check->add_subcommand("partition", "Divergence never grows under coarsening");
  add_phi(partition);
  add_sampled(partition, part_n, part_trials);

  CLI::App* convexity = check->add_subcommand("convexity", "Joint convexity of the divergence");
  add_phi(convexity);
  add_sampled(convexity, conv_n, conv_trials);
  convexity->add_option("--lambdas", lambdas_str, "Mixture weights, comma separated");

  CLI::App* pinsker =
      check->add_subcommand("pinsker", "Quadratic total-variation lower bound");
  add_phi(pinsker);
  add_sampled(pinsker, pin_n, pin_trials);
  pinsker->add_option("--c", c_str, "Constant to verify, or auto to estimate it first");

  CLI::App* characterize =
      check->add_subcommand("characterize", "Is the divergence of Tsallis type?");
  add_phi(characterize);
  add_grid(characterize);
  characterize->add_option(
      "--n", char_n, "Outcome count the verdict applies to; below 3 it is inconclusive");

  // scan
  CLI::App* scan = app.add_subcommand("scan", "Tabulate derived quantities as CSV");
  scan->require_subcommand(1);
  scan->fallthrough();
  CLI::App* scan_g = scan->add_subcommand("g", "Sample g = -inv'/inv'' over (0, 1)");
  add_phi(scan_g);
  add_grid(scan_g);

  // batch
  std::string batch_file = "-";
  CLI::App* batch = app.add_subcommand("batch", "Aggregate one JSON request per input line");
  batch->add_option("--file", batch_file, "JSONL input path, - for stdin");
  batch->fallthrough();

  try {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("phidiv");
    for (const std::string& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (div->parsed()) {
      auto f = phidiv::DeformedExponential::parse(common.phi);
      auto p = phidiv::make_distribution(parse_numbers(p_str));
      auto q = phidiv::make_distribution(parse_numbers(q_str));
      auto r = phidiv::d_phi(f, p, q);
      ordered_json doc{{"command", "div"}, {"phi", f.spec_string()}, {"value", r.value}};
      if (want_terms) doc["terms"] = r.terms;
      return emit(common, os, doc, 0);
    }

    if (normalize->parsed()) {
      auto f = phidiv::DeformedExponential::parse(common.phi);
      auto p = phidiv::make_distribution(parse_numbers(p_str));
      phidiv::FamilyChart chart =
          u0_str.empty() ? phidiv::chart_at(f, p)
                         : phidiv::chart_at(f, p, parse_numbers(u0_str));
      auto tv = phidiv::project_tangent(chart, parse_numbers(u_str));
      auto nr = phidiv::normalizer(chart, tv.u);
      return emit(common, os,
                  {{"command", "family normalize"},
                   {"phi", f.spec_string()},
                   {"psi", nr.psi},
                   {"q", nr.q.weights()},
                   {"u_projected", tv.u},
                   {"u0", chart.u0},
                   {"dphi_residual", phidiv::verify_psi_identity(chart, tv.u)},
                   {"iterations", nr.iterations}},
                  0);
    }

    if (superadd->parsed() || concave->parsed()) {
      auto f = phidiv::DeformedExponential::parse(common.phi);
      auto r = superadd->parsed() ? phidiv::check_superadditive_g(f, grid_n, delta)
                                  : phidiv::check_concave_g(f, grid_n, delta);
      ordered_json doc{{"command", superadd->parsed() ? "check superadd" : "check concave"},
                       {"phi", f.spec_string()}};
      ordered_json rep = report_json(r);
      for (auto& [key, value] : rep.items()) doc[key] = std::move(value);
      return emit(common, os, doc, verdict_exit(r.verdict));
    }

    if (partition->parsed()) {
      auto f = phidiv::DeformedExponential::parse(common.phi);
      auto r = phidiv::check_partition_inequality(f, part_n, part_trials, seed);
      ordered_json doc{{"command", "check partition"}, {"phi", f.spec_string()}};
      ordered_json rep = report_json(r);
      for (auto& [key, value] : rep.items()) doc[key] = std::move(value);
      return emit(common, os, doc, verdict_exit(r.verdict));
    }

    if (convexity->parsed()) {
      auto f = phidiv::DeformedExponential::parse(common.phi);
      std::vector<double> lambdas = parse_numbers(lambdas_str);
      auto r = phidiv::check_joint_convexity(f, conv_n, conv_trials, lambdas, seed);
      ordered_json doc{{"command", "check convexity"}, {"phi", f.spec_string()}};
      ordered_json rep = report_json(r);
      for (auto& [key, value] : rep.items()) doc[key] = std::move(value);
      return emit(common, os, doc, verdict_exit(r.verdict));
    }

    if (pinsker->parsed()) {
      auto f = phidiv::DeformedExponential::parse(common.phi);
      ordered_json doc{{"command", "check pinsker"}, {"phi", f.spec_string()}};
      double c_used = 0.0;
      if (c_str == "auto") {
        auto est = phidiv::pinsker_constant(f);
        doc["estimate"] = {{"c_hat", est.c_hat},
                           {"p_at", est.p_at},
                           {"q_at", est.q_at},
                           {"excluded", est.excluded},
                           {"verdict", phidiv::to_string(est.verdict)}};
        if (est.verdict != phidiv::Verdict::Pass) {
          doc["verdict"] = "Inconclusive";
          return emit(common, os, doc, 0);
        }
        c_used = est.c_hat;
      } else {
        std::size_t used = 0;
        try {
          c_used = std::stod(c_str, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != c_str.size() || !(c_used > 0.0)) {
          throw phidiv::DomainError("--c expects a positive number or auto, got '" +
                                    c_str + "'");
        }
      }
      doc["c"] = c_used;
      auto r = phidiv::check_pinsker(f, c_used, pin_n, pin_trials, seed);
      ordered_json rep = report_json(r);
      for (auto& [key, value] : rep.items()) doc[key] = std::move(value);
      return emit(common, os, doc, verdict_exit(r.verdict));
    }

    if (characterize->parsed()) {
      auto f = phidiv::DeformedExponential::parse(common.phi);
      auto r = phidiv::characterize_tsallis(f, grid_n, delta);
      ordered_json doc{{"command", "check characterize"}, {"phi", f.spec_string()}};
      bool conclusive = char_n == 0 || char_n >= 3;
      doc["verdict"] = conclusive ? phidiv::to_string(r.is_tsallis) : "Inconclusive";
      if (!conclusive) {
        /* On two outcomes every divergence in this class collapses to a
           function of one coordinate pair; the properties separating the
           Tsallis kinds from the rest only bind for three or more. */
        doc["reason"] = "dimension 2 cannot separate the Tsallis kinds";
      }
      doc["q_fit"] = r.q_fit;
      doc["max_residual"] = r.max_residual;
      doc["superadditive"] = report_json(r.superadditive);
      doc["concave"] = report_json(r.concave);
      doc["grid"] = grid_json(r.grid);
      return emit(common, os, doc, conclusive ? verdict_exit(r.is_tsallis) : 0);
    }

    if (scan_g->parsed()) {
      auto f = phidiv::DeformedExponential::parse(common.phi);
      double h = (1.0 - 2.0 * delta) / (grid_n - 1);
      std::string csv = "x,g\n";
      char buf[64];
      for (int i = 0; i < grid_n; ++i) {
        double x = delta + h * i;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x, phidiv::g_func(f, x));
        csv += buf;
      }
      return emit_text(common, os, csv, 0);
    }

    if (batch->parsed()) {
      if (!allow_batch) {
        std::cerr << "error: batch requests cannot nest\n";
        return 1;
      }
      return run_batch(common, batch_file, os);
    }
  } catch (const phidiv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::cerr << "error: no subcommand\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_args(args, std::cout, true);
}
