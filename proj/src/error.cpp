#include "otgforge/error.hpp"

namespace otgforge {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kMissingLabel: return "MissingLabel";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kEmptyLexicon: return "EmptyLexicon";
    case ErrorCode::kNonHateInput: return "NonHateInput";
    case ErrorCode::kEmptyTrainingData: return "EmptyTrainingData";
    case ErrorCode::kNoPositiveTags: return "NoPositiveTags";
    case ErrorCode::kEmptyTargetLexicon: return "EmptyTargetLexicon";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kSingleClassCorpus: return "SingleClassCorpus";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kMalformedScore: return "MalformedScore";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kNoPositives: return "NoPositives";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kInconsistentCounts: return "InconsistentCounts";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kMalformedCheckpoint: return "MalformedCheckpoint";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kStage: return "StageError";
  }
  return "Unknown";
}

}  // namespace otgforge
