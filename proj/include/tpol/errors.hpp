#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tpol {

// Base class for toolkit errors. `code` is a stable machine-readable
// identifier; the CLI surfaces it as {"error": <code>, "message": ...}.
class TpolError : public std::runtime_error {
 public:
  TpolError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

struct MalformedRecord : TpolError {
  explicit MalformedRecord(const std::string& m) : TpolError("malformed_record", m) {}
};

struct AlignmentViolation : TpolError {
  explicit AlignmentViolation(const std::string& m) : TpolError("alignment_violation", m) {}
};

struct IndexOutOfRange : TpolError {
  explicit IndexOutOfRange(const std::string& m) : TpolError("index_out_of_range", m) {}
};

struct MismatchedSentence : TpolError {
  explicit MismatchedSentence(const std::string& m) : TpolError("mismatched_sentence", m) {}
};

struct MissingAlignment : TpolError {
  explicit MissingAlignment(const std::string& m) : TpolError("missing_alignment", m) {}
};

struct InsufficientData : TpolError {
  explicit InsufficientData(const std::string& m) : TpolError("insufficient_data", m) {}
};

struct EmptyCorpus : TpolError {
  explicit EmptyCorpus(const std::string& m) : TpolError("empty_corpus", m) {}
};

struct NonFiniteLikelihood : TpolError {
  explicit NonFiniteLikelihood(const std::string& m) : TpolError("non_finite_likelihood", m) {}
};

struct UntrainedModel : TpolError {
  explicit UntrainedModel(const std::string& m) : TpolError("untrained_model", m) {}
};

struct LengthMismatch : TpolError {
  explicit LengthMismatch(const std::string& m) : TpolError("length_mismatch", m) {}
};

struct SilverWithoutTranslator : TpolError {
  explicit SilverWithoutTranslator(const std::string& m) : TpolError("silver_without_translator", m) {}
};

struct ConfigError : TpolError {
  explicit ConfigError(const std::string& m) : TpolError("config_error", m) {}
};

struct MissingArtifact : TpolError {
  explicit MissingArtifact(const std::string& m) : TpolError("missing_artifact", m) {}
};

struct IoError : TpolError {
  explicit IoError(const std::string& m) : TpolError("io_error", m) {}
};

}  // namespace tpol
