#pragma once

// JSON documents for systems and decomposition reports. Matrices are arrays of
// rows; complex data is split into *_re / *_im arrays.

#include "lqss/kalman.hpp"
#include "lqss/model.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace lqss {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

/// A document is malformed: missing or mistyped field, wrong shape.
class DocumentError : public InputError {
 public:
  using InputError::InputError;
};

class WriteError : public Error {
 public:
  using Error::Error;
};

struct SystemDocument {
  QuadratureSystem system;
  /// Optional overrides from a "tolerance": {"scale": .., "floor": ..} object.
  std::optional<TolerancePolicy> tolerance;
};

/// Parses and validates; DocumentError names the offending field.
SystemDocument parse_system(const Json& doc);
Json system_to_json(const QuadratureSystem& sys);

Json matrix_to_json(const Matrix& M);
/// Expects exactly rows x cols (pass -1 to accept any size for that axis).
Matrix matrix_from_json(const Json& value, const std::string& field, Index rows, Index cols);

struct ReportContext {
  TolerancePolicy tolerance;
  FactorizationMode mode = FactorizationMode::strict;
  ObservabilityBasis basis = ObservabilityBasis::row_space;
};

Json decomposition_to_json(const KalmanDecomposition& dec, const ReportContext& ctx);
/// Rebuilds the stored decomposition (matrices, counts, labels) from a report.
KalmanDecomposition decomposition_from_json(const Json& doc, const QuadratureSystem& sys);

Json read_json_file(const std::string& path);
/// Throws WriteError when the file cannot be written.
void write_text_file(const std::string& path, const std::string& text);

/// Stable text rendering: 2-space indent, shortest round-trip doubles.
std::string dump(const Json& doc);

}  // namespace lqss
