#include "ptres/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace ptres {

namespace fs = std::filesystem;

namespace {

const Json& field(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw FormatError(where.empty() ? "document: expected an object" : where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError((where.empty() ? "" : where + ".") + key + ": missing");
  return *it;
}

std::string path_of(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

long as_int(const Json& v, const std::string& name, long lo) {
  if (!v.is_number_integer()) throw FormatError(name + ": expected an integer");
  long x = v.get<long>();
  if (x < lo) throw FormatError(name + ": must be at least " + std::to_string(lo));
  return x;
}

std::string as_string(const Json& v, const std::string& name) {
  if (!v.is_string()) throw FormatError(name + ": expected a string");
  return v.get<std::string>();
}

const Json& as_array(const Json& v, const std::string& name) {
  if (!v.is_array()) throw FormatError(name + ": expected an array");
  return v;
}

void expect_kind(const Json& j, const std::string& kind) {
  if (!j.is_object()) throw FormatError("document: expected an object");
  auto it = j.find("kind");
  if (it == j.end()) return;  // untagged documents are accepted
  if (!it->is_string() || it->get<std::string>() != kind)
    throw FormatError("kind: expected \"" + kind + "\", found " + it->dump());
}

std::vector<int> dims_with_prefix(const LabeledOperator& op, const std::string& prefix, const std::string& what) {
  std::vector<int> dims;
  for (int k = 0;; ++k) {
    std::string n = prefix + std::to_string(k);
    if (!op.has_leg(n)) break;
    dims.push_back(op.leg(n).dim);
  }
  if (dims.empty()) throw FormatError("legs: " + what + " needs legs " + prefix + "0, " + prefix + "1, ...");
  return dims;
}

fs::path resolve(const std::string& base, const std::string& rel) {
  fs::path p(rel);
  if (p.is_absolute()) return p;
  return fs::path(base).parent_path() / p;
}

}  // namespace

// ---- tensors ---------------------------------------------------------------------

Json tensor_json(const LabeledOperator& op) {
  Json legs = Json::array();
  for (const auto& l : op.legs())
    legs.push_back(Json{{"name", l.name}, {"dim", l.dim}, {"role", role_name(l.role)}, {"step", l.step}});
  const Mat& m = op.matrix();
  std::vector<double> re, im;
  re.reserve(m.size());
  im.reserve(m.size());
  for (long r = 0; r < m.rows(); ++r)
    for (long c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  Json j;
  j["legs"] = legs;
  j["matrix"] = Json{{"re", re}, {"im", im}};
  return j;
}

LabeledOperator tensor_from_json(const Json& j, double tol) {
  const Json& legs = as_array(field(j, "legs", ""), "legs");
  std::vector<Leg> out;
  long D = 1;
  for (size_t k = 0; k < legs.size(); ++k) {
    std::string w = "legs[" + std::to_string(k) + "]";
    Leg l;
    l.name = as_string(field(legs[k], "name", w), w + ".name");
    l.dim = static_cast<int>(as_int(field(legs[k], "dim", w), w + ".dim", 1));
    std::string role = as_string(field(legs[k], "role", w), w + ".role");
    try {
      l.role = parse_role(role);
    } catch (const LabelingError&) {
      throw FormatError(w + ".role: unknown role '" + role + "'");
    }
    l.step = static_cast<int>(as_int(field(legs[k], "step", w), w + ".step", 0));
    if (D > (1L << 24) / l.dim) throw FormatError(w + ".dim: total dimension too large");
    D *= l.dim;
    out.push_back(l);
  }
  const Json& mj = field(j, "matrix", "");
  const Json& re = as_array(field(mj, "re", "matrix"), "matrix.re");
  const Json& im = as_array(field(mj, "im", "matrix"), "matrix.im");
  size_t want = static_cast<size_t>(D * D);
  if (re.size() != want) throw FormatError("matrix.re: expected " + std::to_string(want) + " entries, found " + std::to_string(re.size()));
  if (im.size() != want) throw FormatError("matrix.im: expected " + std::to_string(want) + " entries, found " + std::to_string(im.size()));
  Mat m(D, D);
  for (size_t k = 0; k < want; ++k) {
    if (!re[k].is_number()) throw FormatError("matrix.re[" + std::to_string(k) + "]: expected a number");
    if (!im[k].is_number()) throw FormatError("matrix.im[" + std::to_string(k) + "]: expected a number");
    m(static_cast<long>(k) / D, static_cast<long>(k) % D) = cd(re[k].get<double>(), im[k].get<double>());
  }
  try {
    return LabeledOperator(out, m, tol);
  } catch (const LabelingError& e) {
    throw FormatError(std::string("legs: ") + e.what());
  }
}

Json process_json(const ProcessTensor& t) {
  Json j;
  j["kind"] = "process";
  j["steps"] = t.steps();
  j["mode"] = t.mode() == InitialMode::StateLeg ? "state" : "open";
  Json body = tensor_json(t.choi());
  j["legs"] = body["legs"];
  j["matrix"] = body["matrix"];
  return j;
}

ProcessTensor process_from_json(const Json& j, double tol) {
  expect_kind(j, "process");
  long steps = as_int(field(j, "steps", ""), "steps", 0);
  std::string mode = as_string(field(j, "mode", ""), "mode");
  if (mode != "state" && mode != "open") throw FormatError("mode: expected \"state\" or \"open\"");
  LabeledOperator op = tensor_from_json(j, tol);
  try {
    return ProcessTensor(op, static_cast<int>(steps), mode == "state" ? InitialMode::StateLeg : InitialMode::OpenInput);
  } catch (const LabelingError& e) {
    throw FormatError(std::string("legs: ") + e.what());
  }
}

Json channel_json(const QuantumChannel& ch) {
  Json j;
  j["kind"] = "channel";
  j["trace_preserving"] = ch.trace_preserving();
  Json body = tensor_json(ch.choi());
  j["legs"] = body["legs"];
  j["matrix"] = body["matrix"];
  return j;
}

QuantumChannel channel_from_json(const Json& j, double tol) {
  expect_kind(j, "channel");
  bool tp = true;
  if (j.contains("trace_preserving")) {
    if (!j["trace_preserving"].is_boolean()) throw FormatError("trace_preserving: expected a boolean");
    tp = j["trace_preserving"].get<bool>();
  }
  LabeledOperator op = tensor_from_json(j, tol);
  auto ins = dims_with_prefix(op, "in", "a channel");
  auto outs = dims_with_prefix(op, "out", "a channel");
  if (ins.size() + outs.size() != op.legs().size()) throw FormatError("legs: a channel has only in<k> and out<k> legs");
  std::vector<std::string> order;
  for (size_t k = 0; k < ins.size(); ++k) order.push_back("in" + std::to_string(k));
  for (size_t k = 0; k < outs.size(); ++k) order.push_back("out" + std::to_string(k));
  Mat m = permute_legs(op, order).matrix();
  try {
    return QuantumChannel(m, ins, outs, tp, tol);
  } catch (const DomainError& e) {
    throw FormatError(std::string("matrix: ") + e.what());
  }
}

Json state_json(const DensityOperator& rho) {
  Json j;
  j["kind"] = "state";
  Json body = tensor_json(rho.op());
  j["legs"] = body["legs"];
  j["matrix"] = body["matrix"];
  return j;
}

DensityOperator state_from_json(const Json& j, double tol) {
  expect_kind(j, "state");
  LabeledOperator op = tensor_from_json(j, tol);
  try {
    return DensityOperator(op);
  } catch (const DomainError& e) {
    throw FormatError(std::string("matrix: ") + e.what());
  }
}

// ---- files ---------------------------------------------------------------------

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(path + ": not valid JSON (" + e.what() + ")");
  }
}

void write_json(const std::string& path, const Json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path + ": cannot open for writing");
  out << doc.dump(1) << "\n";
  if (!out) throw FormatError(path + ": write failed");
}

namespace {
template <class F>
auto with_path(const std::string& path, F f) {
  try {
    return f();
  } catch (const FormatError& e) {
    std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw FormatError(path + ": " + msg);
  }
}
}  // namespace

ProcessTensor read_process(const std::string& path, double tol) {
  return with_path(path, [&] { return process_from_json(read_json(path), tol); });
}
void write_process(const std::string& path, const ProcessTensor& t) { write_json(path, process_json(t)); }
QuantumChannel read_channel(const std::string& path, double tol) {
  return with_path(path, [&] { return channel_from_json(read_json(path), tol); });
}
void write_channel(const std::string& path, const QuantumChannel& ch) { write_json(path, channel_json(ch)); }
DensityOperator read_state(const std::string& path, double tol) {
  return with_path(path, [&] { return state_from_json(read_json(path), tol); });
}
void write_state(const std::string& path, const DensityOperator& rho) { write_json(path, state_json(rho)); }

// ---- manifests ---------------------------------------------------------------------

ProcessTensor build_from_manifest(const std::string& path, double tol) {
  return with_path(path, [&] {
    Json j = read_json(path);
    expect_kind(j, "dynamics");
    std::string mode = "state";
    if (j.contains("mode")) mode = as_string(j["mode"], "mode");
    if (mode != "state" && mode != "open") throw FormatError("mode: expected \"state\" or \"open\"");
    std::string rho_file = as_string(field(j, "initial_state", ""), "initial_state");
    const Json& files = as_array(field(j, "channels", ""), "channels");
    std::vector<QuantumChannel> maps;
    for (size_t k = 0; k < files.size(); ++k) {
      std::string w = "channels[" + std::to_string(k) + "]";
      maps.push_back(read_channel(resolve(path, as_string(files[k], w)).string(), tol));
    }
    DensityOperator rho = read_state(resolve(path, rho_file).string(), tol);
    if (mode == "state") {
      try {
        return build_process_tensor(rho, maps);
      } catch (const LabelingError& e) {
        throw FormatError(std::string("channels: ") + e.what());
      }
    }
    if (maps.empty()) throw FormatError("channels: open mode needs at least one channel");
    Dilation d;
    d.mode = InitialMode::OpenInput;
    const auto& in = maps[0].in_dims();
    if (in.size() != 2) throw FormatError("channels[0]: open mode needs channels on (s, e)");
    d.ds = in[0];
    d.de = in[1];
    if (rho.matrix().rows() != d.de) throw FormatError("initial_state: open mode needs a state on e");
    d.rho0 = rho.matrix();
    d.maps = maps;
    try {
      return build_process_tensor(d);
    } catch (const LabelingError& e) {
      throw FormatError(std::string("channels: ") + e.what());
    }
  });
}

Superprocess read_superprocess(const std::string& path, double tol) {
  return with_path(path, [&] {
    Json j = read_json(path);
    expect_kind(j, "superprocess");
    TheoryId th;
    try {
      th = parse_theory(as_string(field(j, "theory", ""), "theory"));
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw FormatError(std::string("theory: ") + e.what());
    }
    SuperprocessComponents c;
    c.steps = static_cast<int>(as_int(field(j, "steps", ""), "steps", 1));
    c.ds = static_cast<int>(as_int(field(j, "ds", ""), "ds", 1));
    c.dz = static_cast<int>(as_int(field(j, "dz", ""), "dz", 1));
    c.ancilla = read_state(resolve(path, as_string(field(j, "ancilla", ""), "ancilla")).string(), tol).matrix();
    auto list = [&](const char* key, std::vector<QuantumChannel>& dst) {
      const Json& a = as_array(field(j, key, ""), key);
      for (size_t k = 0; k < a.size(); ++k)
        dst.push_back(read_channel(resolve(path, as_string(a[k], std::string(key) + "[" + std::to_string(k) + "]")).string(), tol));
    };
    list("V", c.V);
    list("W", c.W);
    list("C", c.C);
    list("K", c.K);
    try {
      return build_superprocess(th, std::move(c));
    } catch (const ConstraintError& e) {
      throw FormatError(std::string("components: ") + e.what());
    } catch (const LabelingError& e) {
      throw FormatError(std::string("components: ") + e.what());
    } catch (const DomainError& e) {
      throw FormatError(std::string("components: ") + e.what());
    }
  });
}

void write_superprocess(const std::string& path, const Superprocess& z) {
  fs::path p(path);
  std::string stem = p.stem().string();
  const auto& c = z.components();
  Json j;
  j["kind"] = "superprocess";
  j["theory"] = z.theory().name();
  j["steps"] = c.steps;
  j["ds"] = c.ds;
  j["dz"] = c.dz;
  std::string anc = stem + "_ancilla.json";
  std::vector<Leg> al{{"z", c.dz, Role::Ancilla, 0}, {"sp", c.ds, Role::Ancilla, 0}};
  write_state((p.parent_path() / anc).string(), DensityOperator(LabeledOperator(al, c.ancilla)));
  j["ancilla"] = anc;
  auto list = [&](const char* key, const std::vector<QuantumChannel>& src) {
    Json a = Json::array();
    for (size_t k = 0; k < src.size(); ++k) {
      std::string f = stem + "_" + key + std::to_string(k) + ".json";
      write_channel((p.parent_path() / f).string(), src[k]);
      a.push_back(f);
    }
    j[key] = a;
  };
  list("V", c.V);
  list("W", c.W);
  list("C", c.C);
  list("K", c.K);
  write_json(path, j);
}

}  // namespace ptres
