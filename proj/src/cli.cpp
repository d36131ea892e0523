#include "ptres/cli.hpp"

#include "ptres/io.hpp"
#include "ptres/monotones.hpp"
#include "ptres/theories.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace ptres {

namespace {

std::string f6(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

// JSON cannot hold infinities; they are written as strings.
Json num(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

Json named_values(const std::vector<NamedValue>& v) {
  Json a = Json::array();
  for (const auto& n : v) a.push_back(Json{{"name", n.name}, {"value", num(n.value)}});
  return a;
}

Json leg_summary(const LabeledOperator& op) {
  Json a = Json::array();
  for (const auto& l : op.legs()) a.push_back(Json{{"name", l.name}, {"dim", l.dim}, {"role", role_name(l.role)}, {"step", l.step}});
  return a;
}

ProcessTensor named_example(const std::string& name) {
  Mat k0 = Mat::Zero(2, 2);
  k0(0, 0) = 1;
  if (name == "swap2") {
    Mat sw = Mat::Zero(4, 4);
    sw(0, 0) = sw(1, 2) = sw(2, 1) = sw(3, 3) = 1;
    Dilation d;
    d.ds = 2;
    d.de = 2;
    d.rho0 = Mat::Zero(4, 4);
    d.rho0(0, 0) = 1;
    d.maps = {unitary_channel(sw, {2, 2}), unitary_channel(sw, {2, 2})};
    return build_process_tensor(d);
  }
  if (name == "prim") return primitive_free_process(2, 2, {k0, k0, k0});
  if (name == "bell") return markov_open_process({identity_channel({2})});
  if (name == "depolarizing") return markov_open_process({depolarizing_channel(2, 0.5)});
  if (name == "markov-identity") {
    std::vector<Leg> s{{"s", 2, Role::Ancilla, 0}};
    return markov_process({identity_channel({2}), identity_channel({2})}, DensityOperator(LabeledOperator(s, k0)));
  }
  throw std::invalid_argument("unknown example '" + name + "' (swap2, prim, bell, depolarizing, markov-identity)");
}

struct Ctx {
  std::ostream& out;
  std::ostream& err;
  double tol = kDefaultTol;
  std::string out_path;
  bool json = false;

  // human text unless --json; the document goes to --out when given
  void emit(const Json& doc, const std::string& text, bool doc_to_file = true) const {
    if (json) out << doc.dump(1) << "\n";
    else out << text;
    if (doc_to_file && !out_path.empty()) write_json(out_path, doc);
  }
};

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::Free: return exit_code::kOk;
    case Verdict::NotFree: return exit_code::kNotFree;
    case Verdict::Inconclusive: return exit_code::kInconclusive;
  }
  return exit_code::kNumerical;
}

Json monotone_json(const MonotoneReport& r) {
  Json j;
  j["value"] = num(r.value);
  j["exact"] = r.exact;
  j["dual_bound"] = r.dual_bound ? num(*r.dual_bound) : Json(nullptr);
  j["method"] = r.method;
  j["note"] = r.note;
  j["diagnostics"] = named_values(r.diagnostics);
  return j;
}

double resolve_tol(const CLI::Option* opt, double flag_value) {
  if (opt->count()) return flag_value;
  if (const char* env = std::getenv("PTRES_TOL")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0)) throw FormatError(std::string("PTRES_TOL: not a positive number: '") + env + "'");
    return v;
  }
  return kDefaultTol;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Process tensors, superprocesses and resource monotones"};
  app.name("ptres");
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  double tol_flag = kDefaultTol;
  std::string out_path;
  bool json = false;
  CLI::Option* tol_opt = app.add_option("--tol", tol_flag, "Absolute tolerance (default: $PTRES_TOL or 1e-9)");
  app.add_option("--seed", seed, "Random seed")->default_val(0);
  app.add_option("--out", out_path, "Output file (tensor, or the structured report)");
  app.add_flag("--json", json, "Print the structured document instead of text");

  std::string file, theory_s = "q,none", monotone = "nonmarkov", relaxation = "ppt-eb", kind = "relative-entropy";
  std::string super_file, path_s = "contraction", dump_dir = ".", witness_file, example;
  int steps = 2, ds = 2, dz = 1, de = 2, trials = 100;
  bool random_free = false, identity = false;
  double thm3_tol = 1e-4;

  auto* validate = app.add_subcommand("validate", "Check the causality hierarchy of a process tensor file");
  validate->add_option("file", file, "Process tensor file")->required();

  auto* build = app.add_subcommand("build", "Build a process tensor from a dynamics manifest");
  build->add_option("manifest", file, "Dynamics manifest")->required();

  auto* classify = app.add_subcommand("classify", "Membership verdict for a theory");
  classify->add_option("file", file, "Process tensor file")->required();
  classify->add_option("--theory", theory_s, "Theory C,K with C,K in {none,eb,q}")->required();

  auto* measure = app.add_subcommand("measure", "Evaluate a resource monotone");
  measure->add_option("file", file, "Process tensor file")->required();
  measure->add_option("--monotone", monotone, "nonmarkov | distance | robustness | dmax")
      ->check(CLI::IsMember({"nonmarkov", "distance", "robustness", "dmax"}));
  measure->add_option("--relaxation", relaxation, "Free-set relaxation for robustness/dmax: product | markov | ppt-eb");
  measure->add_option("--theory", theory_s, "Theory for --monotone distance");
  measure->add_option("--kind", kind, "Distance kind: trace | relative-entropy | max-relative-entropy");
  measure->add_option("--witness", witness_file, "Write the witness process to this file");

  auto* transform = app.add_subcommand("transform", "Apply a superprocess to a process tensor");
  transform->add_option("file", file, "Process tensor file")->required();
  auto* sp_opt = transform->add_option("--superprocess", super_file, "Superprocess manifest");
  auto* rf_opt = transform->add_flag("--random-free", random_free, "Random superprocess free in --theory");
  auto* id_opt = transform->add_flag("--identity", identity, "Identity superprocess");
  sp_opt->excludes(rf_opt)->excludes(id_opt);
  rf_opt->excludes(id_opt);
  transform->add_option("--theory", theory_s, "Theory for --random-free");
  transform->add_option("--dz", dz, "Memory dimension for --random-free")->check(CLI::PositiveNumber);
  transform->add_option("--path", path_s, "circuit | choi | contraction")->check(CLI::IsMember({"circuit", "choi", "contraction"}));

  auto* sample = app.add_subcommand("sample", "Sample a free process of a theory");
  sample->add_option("--theory", theory_s, "Theory C,K")->required();
  sample->add_option("--steps", steps, "Number of steps")->check(CLI::NonNegativeNumber);
  sample->add_option("--ds", ds, "System dimension")->check(CLI::PositiveNumber);
  sample->add_option("--dz", dz, "Superprocess memory dimension")->check(CLI::PositiveNumber);

  auto* thm3 = app.add_subcommand("thm3", "Compare log2(1+R) with the minimal Dmax on the same relaxed set");
  thm3->add_option("file", file, "Process tensor file")->required();
  thm3->add_option("--relaxation", relaxation, "Free-set relaxation");
  thm3->add_option("--equality-tol", thm3_tol, "Allowed |log2(1+R) - Dmax|");

  auto* audit = app.add_subcommand("audit", "Monotonicity trials under random free superprocesses");
  audit->add_option("--theory", theory_s, "Theory C,K")->required();
  audit->add_option("--monotone", monotone, "nonmarkov | robustness")->check(CLI::IsMember({"nonmarkov", "robustness"}));
  audit->add_option("--trials", trials, "Number of trials")->check(CLI::NonNegativeNumber);
  audit->add_option("--steps", steps, "Steps of the random processes")->check(CLI::PositiveNumber);
  audit->add_option("--de", de, "Environment dimension of the random processes")->check(CLI::PositiveNumber);
  audit->add_option("--dz", dz, "Superprocess memory dimension")->check(CLI::PositiveNumber);
  audit->add_option("--dump-dir", dump_dir, "Directory for failing instances");

  auto* ex = app.add_subcommand("example", "Write a named example process");
  ex->add_option("name", example, "swap2 | prim | bell | depolarizing | markov-identity")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_code::kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kInvalidInput;
  }

  try {
    Ctx ctx{out, err, resolve_tol(tol_opt, tol_flag), out_path, json};
    const double tol = ctx.tol;
    std::ostringstream text;

    if (*validate) {
      ProcessTensor t = read_process(file, tol);
      auto rep = validate_causality(t, tol);
      Json doc{{"command", "validate"}, {"file", file}, {"pass", rep.pass}, {"psd", rep.psd},
               {"min_eigenvalue", rep.min_eigenvalue}, {"max_deviation", rep.max_deviation}, {"tol", tol}};
      Json lv = Json::array();
      text << "causality: " << (rep.pass ? "valid" : "INVALID") << "\n";
      text << "  min eigenvalue  " << f6(rep.min_eigenvalue) << "\n";
      for (size_t k = 0; k < rep.levels.size(); ++k) {
        lv.push_back(Json{{"step", rep.levels[k]}, {"deviation", rep.deviations[k]}});
        text << "  level " << rep.levels[k] << " residual " << f6(rep.deviations[k]) << "\n";
      }
      doc["levels"] = lv;
      text << "  max residual    " << f6(rep.max_deviation) << "\n";
      ctx.emit(doc, text.str());
      return rep.pass ? exit_code::kOk : exit_code::kInvalidInput;
    }

    auto write_tensor_result = [&](const ProcessTensor& t, const std::string& what, Json extra) {
      auto rep = validate_causality(t, std::max(tol, 1e-8));
      Json doc = process_json(t);
      if (!out_path.empty()) write_json(out_path, doc);
      Json summary{{"command", what}, {"steps", t.steps()}, {"mode", t.mode() == InitialMode::StateLeg ? "state" : "open"},
                   {"legs", leg_summary(t.choi())}, {"causality_residual", rep.max_deviation}, {"valid", rep.pass}};
      for (auto it = extra.begin(); it != extra.end(); ++it) summary[it.key()] = it.value();
      if (out_path.empty()) {
        out << doc.dump(1) << "\n";  // the tensor itself is the output
      } else {
        summary["out"] = out_path;
        if (json) {
          out << summary.dump(1) << "\n";
        } else {
          out << what << ": wrote " << out_path << " (" << t.steps() << " steps, Choi dimension " << t.choi().dim()
              << ", causality residual " << f6(rep.max_deviation) << ")\n";
        }
      }
      return rep.pass ? exit_code::kOk : exit_code::kNumerical;
    };

    if (*build) return write_tensor_result(build_from_manifest(file, tol), "build", Json::object());

    if (*ex) return write_tensor_result(named_example(example), "example", Json{{"name", example}});

    if (*sample) {
      TheoryId th = parse_theory(theory_s);
      ProcessTensor t = sample_free_process(th, steps, ds, dz, seed);
      return write_tensor_result(t, "sample", Json{{"theory", th.name()}, {"seed", seed}});
    }

    if (*transform) {
      ProcessTensor t = read_process(file, tol);
      LeftPath path = path_s == "circuit" ? LeftPath::Circuit : path_s == "choi" ? LeftPath::Choi : LeftPath::Contraction;
      if (path == LeftPath::Circuit) throw CapabilityError("transform: files carry no dilation; use --path choi or contraction");
      std::optional<Superprocess> z;
      if (!super_file.empty()) z = read_superprocess(super_file, tol);
      else if (random_free) {
        Rng rng(seed);
        z = random_free_superprocess(parse_theory(theory_s), t.steps(), t.out_dim(t.steps()), dz, rng);
      } else if (identity) z = identity_superprocess(t.steps(), t.out_dim(t.steps()));
      else throw std::invalid_argument("transform: give --superprocess, --random-free or --identity");
      ProcessTensor r = left_action(t, *z, path);
      return write_tensor_result(r, "transform", Json{{"theory", z->theory().name()}, {"path", left_path_name(path)}});
    }

    if (*classify) {
      TheoryId th = parse_theory(theory_s);
      ProcessTensor t = read_process(file, tol);
      auto v = check_membership(th, t, tol);
      Json doc{{"command", "classify"}, {"file", file}, {"theory", th.name()}, {"verdict", verdict_name(v.verdict)},
               {"certificate", v.certificate}, {"deviations", named_values(v.deviations)}, {"tol", tol}};
      text << "theory " << th.name() << ": " << verdict_name(v.verdict) << "\n  " << v.certificate << "\n";
      for (const auto& d : v.deviations) text << "  " << d.name << " " << f6(d.value) << "\n";
      ctx.emit(doc, text.str());
      return verdict_exit(v.verdict);
    }

    if (*measure) {
      ProcessTensor t = read_process(file, tol);
      MonotoneReport r;
      Json doc{{"command", "measure"}, {"file", file}, {"monotone", monotone}};
      std::string unit = "bits";
      if (monotone == "nonmarkov") {
        r = non_markovianity(t, tol);
      } else if (monotone == "distance") {
        TheoryId th = parse_theory(theory_s);
        r = distance_to_free_set(t, th, parse_distance_kind(kind), tol);
        doc["theory"] = th.name();
        doc["kind"] = kind;
        if (kind == "trace") unit = "";
      } else if (monotone == "robustness") {
        r = global_robustness(t, parse_relaxation(relaxation), tol);
        doc["relaxation"] = relaxation;
        unit = "";
      } else {
        r = dmax_to_free_set(t, parse_relaxation(relaxation), tol);
        doc["relaxation"] = relaxation;
      }
      Json body = monotone_json(r);
      for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
      if (!witness_file.empty() && r.witness) {
        write_process(witness_file, *r.witness);
        doc["witness_file"] = witness_file;
      }
      text << f6(r.value) << (unit.empty() ? "" : " " + unit) << "\n";
      text << "  exact: " << (r.exact ? "yes" : "no") << "  (" << r.method << ")\n";
      if (r.dual_bound) text << "  dual bound: " << f6(*r.dual_bound) << "\n";
      if (!r.note.empty()) text << "  " << r.note << "\n";
      ctx.emit(doc, text.str());
      return exit_code::kOk;
    }

    if (*thm3) {
      ProcessTensor t = read_process(file, tol);
      auto r = thm3_check(t, parse_relaxation(relaxation), thm3_tol);
      Json doc{{"command", "thm3"}, {"file", file}, {"relaxation", relaxation}, {"robustness", r.robustness},
               {"log2_one_plus_robustness", r.log_robustness}, {"min_dmax", r.dmax}, {"difference", r.difference},
               {"robustness_sdp_gap", r.robustness_gap}, {"dmax_sdp_gap", r.dmax_gap}, {"equality_tol", thm3_tol},
               {"pass", r.pass}};
      text << "robustness R        " << f6(r.robustness) << "\n";
      text << "log2(1+R)           " << f6(r.log_robustness) << " bits\n";
      text << "min Dmax            " << f6(r.dmax) << " bits\n";
      text << "difference          " << f6(r.difference) << (r.pass ? "  (equal)" : "  (MISMATCH)") << "\n";
      ctx.emit(doc, text.str());
      return r.pass ? exit_code::kOk : exit_code::kNumerical;
    }

    if (*audit) {
      TheoryId th = parse_theory(theory_s);
      AuditOptions o;
      o.steps = steps;
      o.de = de;
      o.dz = dz;
      auto r = monotonicity_audit(th, parse_audit_monotone(monotone), trials, seed, o);
      Json recs = Json::array();
      for (const auto& x : r.records)
        recs.push_back(Json{{"trial", x.trial}, {"seed", x.seed}, {"before", x.before}, {"after", x.after}, {"delta", x.delta}});
      Json dumped = Json::array();
      if (!r.failures.empty()) {
        std::filesystem::create_directories(dump_dir);
        for (const auto& f : r.failures) {
          std::string base = (std::filesystem::path(dump_dir) / ("audit_trial" + std::to_string(f.trial.trial))).string();
          write_process(base + "_input.json", f.input);
          write_process(base + "_output.json", f.output);
          dumped.push_back(base + "_input.json");
          dumped.push_back(base + "_output.json");
        }
      }
      Json doc{{"command", "audit"}, {"theory", th.name()}, {"monotone", audit_monotone_name(r.monotone)},
               {"trials", r.trials}, {"seed", seed}, {"violations", r.violations}, {"min_delta", num(r.min_delta)},
               {"pass", r.pass}, {"records", recs}, {"dumped", dumped}};
      text << "audit " << audit_monotone_name(r.monotone) << " under " << th.name() << ": " << r.trials << " trials, "
           << r.violations << " violations, min decrease " << f6(r.min_delta) << (r.pass ? "  PASS" : "  FAIL") << "\n";
      ctx.emit(doc, text.str());
      return r.pass ? exit_code::kOk : exit_code::kNotFree;
    }
    err << "error: no subcommand\n";
    return exit_code::kInvalidInput;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_code::kNumerical;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return exit_code::kInvalidInput;
  } catch (const std::domain_error& e) {
    err << "invalid input: " << e.what() << "\n";
    return exit_code::kInvalidInput;
  } catch (const std::logic_error& e) {
    err << "unsupported: " << e.what() << "\n";
    return exit_code::kInvalidInput;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return exit_code::kNumerical;
  }
}

}  // namespace ptres
