#include "lqss/io.hpp"

#include <fstream>
#include <sstream>

namespace lqss {

namespace {

std::string shape_text(Index rows, Index cols) {
  auto axis = [](Index v) { return v < 0 ? std::string("any") : std::to_string(v); };
  return axis(rows) + "x" + axis(cols);
}

const Json& require_field(const Json& doc, const char* field) {
  if (!doc.contains(field)) throw DocumentError(std::string("missing field '") + field + "'");
  return doc.at(field);
}

Index require_count(const Json& doc, const char* field) {
  const Json& v = require_field(doc, field);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw DocumentError(std::string("field '") + field + "': expected a positive integer");
  }
  return static_cast<Index>(v.get<long long>());
}

StateClass class_from_string(const std::string& s) {
  for (StateClass c : {StateClass::co, StateClass::cbar_o, StateClass::c_obar, StateClass::cbar_obar}) {
    if (s == to_string(c)) return c;
  }
  throw DocumentError("unknown state class '" + s + "'");
}

std::vector<double> doubles(const Json& v, const std::string& field) {
  if (!v.is_array()) throw DocumentError("field '" + field + "': expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw DocumentError("field '" + field + "': expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

Json matrix_to_json(const Matrix& M) {
  Json rows = Json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& value, const std::string& field, Index rows, Index cols) {
  if (!value.is_array()) throw DocumentError("field '" + field + "': expected an array of rows");
  const Index r = static_cast<Index>(value.size());
  Index c = -1;
  for (const auto& row : value) {
    if (!row.is_array()) throw DocumentError("field '" + field + "': every row must be an array");
    const Index len = static_cast<Index>(row.size());
    if (c >= 0 && len != c) throw DocumentError("field '" + field + "': rows have different lengths");
    c = len;
  }
  if (c < 0) c = 0;
  if ((rows >= 0 && r != rows) || (cols >= 0 && c != cols)) {
    throw DocumentError("field '" + field + "': expected " + shape_text(rows, cols) + " array, got " +
                        shape_text(r, c));
  }
  Matrix M(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) {
      const Json& x = value[static_cast<size_t>(i)][static_cast<size_t>(j)];
      if (!x.is_number()) {
        throw DocumentError("field '" + field + "': entry (" + std::to_string(i) + "," + std::to_string(j) +
                            ") is not a number");
      }
      M(i, j) = x.get<double>();
    }
  }
  return M;
}

SystemDocument parse_system(const Json& doc) {
  if (!doc.is_object()) throw DocumentError("system document must be a JSON object");
  if (doc.contains("schema") && doc.at("schema") != kSchemaVersion) {
    throw DocumentError("field 'schema': unsupported version " + doc.at("schema").dump());
  }
  const Index n = require_count(doc, "n");
  const Index m = require_count(doc, "m");
  Matrix R = matrix_from_json(require_field(doc, "R"), "R", 2 * n, 2 * n);

  const bool real_c = doc.contains("C");
  const bool complex_l = doc.contains("Lq_re") || doc.contains("Lq_im") || doc.contains("Lp_re") ||
                         doc.contains("Lp_im");
  if (real_c == complex_l) {
    throw DocumentError("coupling: give exactly one of 'C' or 'Lq_re'/'Lq_im'/'Lp_re'/'Lp_im'");
  }
  const bool real_sigma = doc.contains("Sigma");
  const bool complex_s = doc.contains("S_re") || doc.contains("S_im");
  if (real_sigma == complex_s) throw DocumentError("scattering: give exactly one of 'Sigma' or 'S_re'/'S_im'");

  PhysicalSpec phys;
  if (complex_l || complex_s) {
    phys.S = ComplexMatrix::Identity(m, m);
    phys.Lq = ComplexMatrix::Zero(m, n);
    phys.Lp = ComplexMatrix::Zero(m, n);
  }
  if (complex_l) {
    auto complex_field = [&](const char* re, const char* im) {
      ComplexMatrix out(m, n);
      out.real() = matrix_from_json(require_field(doc, re), re, m, n);
      out.imag() = matrix_from_json(require_field(doc, im), im, m, n);
      return out;
    };
    phys.Lq = complex_field("Lq_re", "Lq_im");
    phys.Lp = complex_field("Lp_re", "Lp_im");
  }
  if (complex_s) {
    phys.S.real() = matrix_from_json(require_field(doc, "S_re"), "S_re", m, m);
    phys.S.imag() = matrix_from_json(require_field(doc, "S_im"), "S_im", m, m);
  }
  const CouplingData derived =
      complex_l || complex_s ? from_physical(phys) : CouplingData{Matrix(), Matrix()};

  Matrix C = real_c ? matrix_from_json(doc.at("C"), "C", 2 * m, 2 * n) : derived.C;
  Matrix Sigma = real_sigma ? matrix_from_json(doc.at("Sigma"), "Sigma", 2 * m, 2 * m) : derived.Sigma;

  SystemDocument out{QuadratureSystem::build(std::move(R), std::move(C), std::move(Sigma)), std::nullopt};
  if (doc.contains("tolerance")) {
    const Json& t = doc.at("tolerance");
    if (!t.is_object()) throw DocumentError("field 'tolerance': expected an object");
    TolerancePolicy p;
    if (t.contains("scale")) {
      if (!t.at("scale").is_number() || t.at("scale").get<double>() <= 0.0) {
        throw DocumentError("field 'tolerance.scale': expected a positive number");
      }
      p.scale = t.at("scale").get<double>();
    }
    if (t.contains("floor")) {
      if (!t.at("floor").is_number() || t.at("floor").get<double>() < 0.0) {
        throw DocumentError("field 'tolerance.floor': expected a nonnegative number");
      }
      p.floor = t.at("floor").get<double>();
    }
    out.tolerance = p;
  }
  return out;
}

Json system_to_json(const QuadratureSystem& sys) {
  Json doc;
  doc["schema"] = kSchemaVersion;
  doc["n"] = sys.modes();
  doc["m"] = sys.fields();
  doc["R"] = matrix_to_json(sys.R());
  doc["C"] = matrix_to_json(sys.C());
  doc["Sigma"] = matrix_to_json(sys.Sigma());
  return doc;
}

Json decomposition_to_json(const KalmanDecomposition& dec, const ReportContext& ctx) {
  Json doc;
  doc["schema"] = kSchemaVersion;
  doc["tool_version"] = kToolVersion;
  doc["dims"] = {{"n", dec.n}, {"m", dec.m}, {"k", dec.k}, {"l", dec.l}, {"d", dec.d}};
  doc["tolerance"] = {{"scale", ctx.tolerance.scale},
                      {"floor", ctx.tolerance.floor},
                      {"mode", to_string(ctx.mode)},
                      {"basis", to_string(ctx.basis)}};
  doc["V"] = matrix_to_json(dec.V);
  doc["A_hat"] = matrix_to_json(dec.A_hat);
  doc["B_hat"] = matrix_to_json(dec.B_hat);
  doc["C_hat"] = matrix_to_json(dec.C_hat);
  doc["D"] = matrix_to_json(dec.D);
  doc["xi"] = dec.E.xi_top;

  Json states = Json::array();
  for (const auto& s : classify_states(dec)) {
    Json row = Json::array();
    for (Index j = 0; j < s.row.size(); ++j) row.push_back(s.row(j));
    states.push_back({{"state", s.name}, {"class", to_string(s.label)}, {"row", std::move(row)}});
  }
  doc["states"] = std::move(states);

  Json residuals = Json::object();
  for (const auto& c : dec.residuals.checks()) {
    residuals[c.name] = {{"value", c.value}, {"limit", c.limit}, {"passed", c.passed}};
  }
  doc["residuals"] = std::move(residuals);
  doc["z_condition"] = dec.z_condition;
  return doc;
}

KalmanDecomposition decomposition_from_json(const Json& doc, const QuadratureSystem& sys) {
  if (!doc.is_object()) throw DocumentError("report must be a JSON object");
  if (!doc.contains("schema") || doc.at("schema") != kSchemaVersion) {
    throw DocumentError("field 'schema': expected " + std::to_string(kSchemaVersion));
  }
  const Json& dims = require_field(doc, "dims");
  auto count = [&](const char* f) {
    const Json& v = require_field(dims, f);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw DocumentError(std::string("field 'dims.") + f + "': expected a nonnegative integer");
    }
    return static_cast<Index>(v.get<long long>());
  };
  KalmanDecomposition dec;
  dec.n = count("n");
  dec.m = count("m");
  dec.k = count("k");
  dec.l = count("l");
  dec.d = count("d");
  if (dec.n != sys.modes() || dec.m != sys.fields()) {
    throw DocumentError("field 'dims': report is for n=" + std::to_string(dec.n) + " m=" +
                        std::to_string(dec.m) + ", system has n=" + std::to_string(sys.modes()) +
                        " m=" + std::to_string(sys.fields()));
  }
  if (dec.k + dec.l + dec.d != dec.n) throw DocumentError("field 'dims': k + l + d must equal n");
  const Index n = dec.n, m = dec.m;
  dec.V = matrix_from_json(require_field(doc, "V"), "V", 2 * n, 2 * n);
  dec.A_hat = matrix_from_json(require_field(doc, "A_hat"), "A_hat", 2 * n, 2 * n);
  dec.B_hat = matrix_from_json(require_field(doc, "B_hat"), "B_hat", 2 * n, 2 * m);
  dec.C_hat = matrix_from_json(require_field(doc, "C_hat"), "C_hat", 2 * m, 2 * n);
  dec.D = matrix_from_json(require_field(doc, "D"), "D", 2 * m, 2 * m);

  const Json& states = require_field(doc, "states");
  if (!states.is_array() || static_cast<Index>(states.size()) != 2 * n) {
    throw DocumentError("field 'states': expected " + std::to_string(2 * n) + " entries");
  }
  for (const auto& s : states) {
    if (!s.is_object() || !s.contains("class") || !s.at("class").is_string()) {
      throw DocumentError("field 'states': every entry needs a string 'class'");
    }
    dec.labels.push_back(class_from_string(s.at("class").get<std::string>()));
  }

  std::vector<double> xi = doc.contains("xi") ? doubles(doc.at("xi"), "xi") : std::vector<double>{};
  if (static_cast<Index>(xi.size()) != dec.k) throw DocumentError("field 'xi': expected k entries");
  dec.E = CanonicalE::strict(4 * n * m, n, std::move(xi), dec.l);
  if (doc.contains("z_condition") && doc.at("z_condition").is_number()) {
    dec.z_condition = doc.at("z_condition").get<double>();
  }
  return dec;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DocumentError("cannot read '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DocumentError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw WriteError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw WriteError("failed while writing '" + path + "'");
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace lqss
