#include "lqss/cli.hpp"

#include "lqss/io.hpp"
#include "lqss/kalman.hpp"
#include "lqss/optomechanical.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>

namespace lqss::cli {

namespace {

struct CommonFlags {
  std::optional<double> tolerance;
  std::string mode = "strict";
  std::string basis = "row-space";
  std::string format;
  std::string output;
};

struct ExampleFlags {
  bool use = false;
  double omega = 1.0;
  double lambda = 1.0;
  double gamma = 1.0;

  OptomechanicalParams params() const { return {omega, lambda, gamma}; }
};

void add_decomposition_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--tolerance", f.tolerance, "Scale of the rank threshold")->check(CLI::PositiveNumber);
  cmd->add_option("--mode", f.mode, "Factorization mode")->check(CLI::IsMember({"strict", "relaxed"}));
  cmd->add_option("--basis", f.basis, "Matrix handed to the factorization")
      ->check(CLI::IsMember({"row-space", "raw"}));
}

void add_output_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("--output", f.output, "Write to this file instead of standard output");
}

void add_example_params(CLI::App* cmd, ExampleFlags& e) {
  cmd->add_option("--omega", e.omega, "Optical mode frequency");
  cmd->add_option("--lambda", e.lambda, "Optomechanical coupling");
  cmd->add_option("--gamma", e.gamma, "Optical decay amplitude");
}

struct Loaded {
  QuadratureSystem system;
  TolerancePolicy tolerance;
};

Loaded load(const std::string& input, const ExampleFlags& ex, const CommonFlags& flags) {
  std::optional<SystemDocument> doc;
  if (ex.use) {
    if (!input.empty()) throw DocumentError("give either an input file or --example, not both");
    doc = SystemDocument{optomechanical_system(ex.params()), std::nullopt};
  } else {
    if (input.empty()) throw DocumentError("an input file (or --example) is required");
    doc = parse_system(read_json_file(input));
  }
  TolerancePolicy policy = doc->tolerance.value_or(TolerancePolicy{});
  if (flags.tolerance) policy.scale = *flags.tolerance;
  return {doc->system, policy};
}

KalmanOptions options_from(const CommonFlags& flags, const TolerancePolicy& policy) {
  KalmanOptions o;
  o.tolerance = policy;
  o.mode = flags.mode == "relaxed" ? FactorizationMode::relaxed : FactorizationMode::strict;
  o.basis = flags.basis == "raw" ? ObservabilityBasis::raw : ObservabilityBasis::row_space;
  return o;
}

ReportContext context_from(const KalmanOptions& o) { return {o.tolerance, o.mode, o.basis}; }

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", std::abs(v) < 1e-13 ? 0.0 : v);
  return buf;
}

std::string describe_row(const Vector& row, Index n) {
  std::string out;
  for (Index j = 0; j < row.size(); ++j) {
    const double c = row(j);
    if (std::abs(c) < 1e-12) continue;
    const std::string var = (j < n ? "q" : "p") + std::to_string(j % n + 1);
    if (out.empty()) {
      out += (c < 0 ? "-" : "");
    } else {
      out += (c < 0 ? " - " : " + ");
    }
    if (std::abs(std::abs(c) - 1.0) > 1e-12) out += number(std::abs(c)) + " ";
    out += var;
  }
  return out.empty() ? "0" : out;
}

std::string matrix_text(const Matrix& M) {
  std::string out;
  char buf[32];
  for (Index i = 0; i < M.rows(); ++i) {
    out += "  ";
    for (Index j = 0; j < M.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), " %12.6g", std::abs(M(i, j)) < 1e-13 ? 0.0 : M(i, j));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string dims_line(const KalmanDecomposition& dec) {
  return "k=" + std::to_string(dec.k) + " l=" + std::to_string(dec.l) + " d=" + std::to_string(dec.d) + "\n";
}

std::string states_text(const KalmanDecomposition& dec) {
  std::string out = "states:\n";
  char buf[64];
  for (const auto& s : classify_states(dec)) {
    std::snprintf(buf, sizeof(buf), "  %-5s %-10s ", s.name.c_str(), to_string(s.label));
    out += buf + describe_row(s.row, dec.n) + "\n";
  }
  return out;
}

std::string decomposition_text(const KalmanDecomposition& dec, bool full) {
  std::string out = dims_line(dec) + states_text(dec);
  if (full) {
    out += "V:\n" + matrix_text(dec.V);
    out += "A_hat:\n" + matrix_text(dec.A_hat);
    out += "B_hat:\n" + matrix_text(dec.B_hat);
    out += "C_hat:\n" + matrix_text(dec.C_hat);
  }
  out += "residuals:\n" + dec.residuals.to_string();
  return out;
}

void emit(const std::string& text, const CommonFlags& flags, std::ostream& out) {
  if (flags.output.empty()) {
    out << text;
  } else {
    write_text_file(flags.output, text);
  }
}

// ---------------------------------------------------------------------------

int cmd_analyze(const std::string& input, const ExampleFlags& ex, const CommonFlags& flags, std::ostream& out) {
  const Loaded in = load(input, ex, flags);
  const KalmanOptions opts = options_from(flags, in.tolerance);
  const KalmanDecomposition dec = kalman_decompose(in.system, opts);
  if (flags.format == "json") {
    Json full = decomposition_to_json(dec, context_from(opts));
    Json doc;
    doc["schema"] = kSchemaVersion;
    doc["tool_version"] = kToolVersion;
    doc["dims"] = full["dims"];
    doc["states"] = full["states"];
    doc["residuals"] = full["residuals"];
    emit(dump(doc), flags, out);
  } else {
    emit(decomposition_text(dec, false), flags, out);
  }
  return kOk;
}

int cmd_decompose(const std::string& input, const ExampleFlags& ex, const CommonFlags& flags,
                  std::ostream& out) {
  const Loaded in = load(input, ex, flags);
  const KalmanOptions opts = options_from(flags, in.tolerance);
  const KalmanDecomposition dec = kalman_decompose(in.system, opts);
  if (flags.format == "json") {
    emit(dump(decomposition_to_json(dec, context_from(opts))), flags, out);
  } else {
    emit(decomposition_text(dec, true), flags, out);
  }
  return kOk;
}

int cmd_verify(const std::string& input, const std::string& report_path, const ExampleFlags& ex,
               const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  const Loaded in = load(input, ex, flags);
  const KalmanDecomposition dec = decomposition_from_json(read_json_file(report_path), in.system);
  const CheckReport report = verify_decomposition(in.system, dec, VerifyTolerances{}, in.tolerance);
  out << report.to_string();
  if (!report.passed()) {
    std::string names;
    for (const auto& n : report.failed_names()) names += " " + n;
    err << "verification failed:" << names << "\n";
    return kVerifyFailure;
  }
  out << "all checks passed\n";
  return kOk;
}

int cmd_example(const ExampleFlags& ex, bool system_only, const CommonFlags& flags, std::ostream& out) {
  const OptomechanicalParams p = ex.params();
  const QuadratureSystem sys = optomechanical_system(p);
  if (system_only) {
    emit(dump(system_to_json(sys)), flags, out);
    return kOk;
  }
  TolerancePolicy policy;
  if (flags.tolerance) policy.scale = *flags.tolerance;
  const KalmanOptions opts = options_from(flags, policy);
  const KalmanDecomposition dec = kalman_decompose(sys, opts);
  const KalmanDecomposition reference = adopt_transform(sys, optomechanical_reference_transform(p), opts);
  const KalmanDecomposition refined = refine(sys, reference, optomechanical_reference_refinement(p), opts);
  const double a = coefficient_a(p.omega);
  const double b = coefficient_b(p.omega);

  if (flags.format == "json") {
    Json doc;
    doc["schema"] = kSchemaVersion;
    doc["tool_version"] = kToolVersion;
    doc["parameters"] = {{"omega", p.omega}, {"lambda", p.lambda}, {"gamma", p.gamma}};
    doc["a"] = a;
    doc["b"] = b;
    doc["system"] = system_to_json(sys);
    doc["decomposition"] = decomposition_to_json(dec, context_from(opts));
    doc["refined"] = decomposition_to_json(refined, context_from(opts));
    emit(dump(doc), flags, out);
  } else {
    std::string text = "optomechanical example: omega=" + number(p.omega) + " lambda=" + number(p.lambda) +
                       " gamma=" + number(p.gamma) + "\n";
    text += "a=" + number(a) + " b=" + number(b) + "\n\n";
    text += "computed decomposition\n" + decomposition_text(dec, true);
    text += "\nreference V refined by (X, Y)\n" + decomposition_text(refined, true);
    emit(text, flags, out);
  }
  return kOk;
}

int cmd_generate(std::uint64_t seed, Index n, Index m, const std::string& structure, bool identity,
                 const CommonFlags& flags, std::ostream& out) {
  RandomSystemOptions opts;
  if (identity) opts.scattering = RandomSystemOptions::Scattering::identity;
  if (!structure.empty()) {
    PlantedStructure planted;
    char c1 = 0, c2 = 0;
    std::istringstream in(structure);
    if (!(in >> planted.k >> c1 >> planted.l >> c2 >> planted.d) || c1 != ',' || c2 != ',' || !in.eof()) {
      throw DocumentError("--structure expects k,l,d");
    }
    opts.planted = planted;
  }
  emit(dump(system_to_json(random_system(n, m, seed, opts))), flags, out);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kalman decomposition of linear quantum stochastic systems", "lqss"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string input, report_path;
  CommonFlags flags;
  ExampleFlags ex;

  auto* analyze = app.add_subcommand("analyze", "Print (k, l, d), state classes and residuals");
  analyze->add_option("input", input, "System document (JSON)");
  analyze->add_flag("--example", ex.use, "Use the built-in optomechanical system");
  add_example_params(analyze, ex);
  add_decomposition_flags(analyze, flags);
  add_output_flags(analyze, flags);

  auto* decompose = app.add_subcommand("decompose", "Write a full decomposition report");
  decompose->add_option("input", input, "System document (JSON)");
  decompose->add_flag("--example", ex.use, "Use the built-in optomechanical system");
  add_example_params(decompose, ex);
  add_decomposition_flags(decompose, flags);
  add_output_flags(decompose, flags);

  auto* verify = app.add_subcommand("verify", "Recheck a stored report against its system");
  verify->add_option("input", input, "System document (JSON)")->required();
  verify->add_option("report", report_path, "Decomposition report (JSON)")->required();
  verify->add_option("--tolerance", flags.tolerance, "Scale of the rank threshold")->check(CLI::PositiveNumber);

  bool system_only = false;
  auto* example = app.add_subcommand("example", "Built-in optomechanical system and its decompositions");
  add_example_params(example, ex);
  example->add_flag("--system-only", system_only, "Emit only the system document");
  add_decomposition_flags(example, flags);
  add_output_flags(example, flags);

  std::uint64_t seed = 0;
  Index n = 3, m = 1;
  std::string structure;
  bool identity = false;
  auto* generate = app.add_subcommand("generate", "Write a random system document");
  generate->add_option("--seed", seed, "Random seed");
  generate->add_option("--n", n, "Number of modes")->check(CLI::PositiveNumber);
  generate->add_option("--m", m, "Number of fields")->check(CLI::PositiveNumber);
  generate->add_option("--structure", structure, "Planted group sizes k,l,d");
  generate->add_flag("--identity-scattering", identity, "Use Sigma = I");
  add_output_flags(generate, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }

  if (flags.format.empty()) flags.format = *analyze ? "text" : "json";

  try {
    if (*analyze) return cmd_analyze(input, ex, flags, out);
    if (*decompose) return cmd_decompose(input, ex, flags, out);
    if (*verify) return cmd_verify(input, report_path, ex, flags, out, err);
    if (*example) return cmd_example(ex, system_only, flags, out);
    if (*generate) return cmd_generate(seed, n, m, structure, identity, flags, out);
  } catch (const WriteError& e) {
    err << "error: " << e.what() << "\n";
    return kWriteFailure;
  } catch (const RankAmbiguityError& e) {
    err << "error: " << e.what() << "\n  singular values:";
    for (double v : e.singular_values()) err << " " << v;
    err << "\n  skew values:";
    for (double v : e.skew_values()) err << " " << v;
    err << "\n  threshold: " << e.threshold() << "\n";
    return kRankAmbiguity;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed document: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}

}  // namespace lqss::cli
