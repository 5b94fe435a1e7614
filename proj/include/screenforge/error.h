#ifndef SCREENFORGE_ERROR_H_
#define SCREENFORGE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace screenforge {

// Every failure the library reports carries one of these codes so callers
// (and the CLI exit-code mapping) can branch without string matching.
enum class Errc {
  // SMILES / molecule construction
  kSyntax,
  kUnclosedRing,
  kUnbalancedParenthesis,
  kUnknownElement,
  kValenceViolation,
  kInvalidBond,
  kInvalidCharge,
  // descriptors
  kInvalidDescriptors,
  kUntypedAtom,
  // fingerprints / similarity
  kInvalidConfig,
  kConfigMismatch,
  kInvalidK,
  kInvalidMatrix,
  // neural network
  kShapeMismatch,
  kLengthMismatch,
  kNonPositiveIC50,
  kTooFewRecords,
  kInconsistentActivity,
  kFormat,
  // pharmacophore
  kInsufficientTraining,
  // orchestration
  kIo,
  kEmptyActiveSet,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace screenforge

#endif  // SCREENFORGE_ERROR_H_
