#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace otgforge {

enum class ErrorCode {
  kMalformedRecord,
  kMissingLabel,
  kDuplicateId,
  kEmptyLexicon,
  kNonHateInput,
  kEmptyTrainingData,
  kNoPositiveTags,
  kEmptyTargetLexicon,
  kEmptyInput,
  kSingleClassCorpus,
  kEmptyCorpus,
  kMalformedScore,
  kOutOfRange,
  kNoPositives,
  kSingleClass,
  kInconsistentCounts,
  kIo,
  kMalformedCheckpoint,
  kConfig,
  kStage,
};

std::string_view error_code_name(ErrorCode code);

// All library failures surface as this exception type; `code()` identifies the
// contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace otgforge
