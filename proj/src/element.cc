#include "screenforge/element.h"

#include <array>
#include <string>

#include "screenforge/error.h"

namespace screenforge {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kSyntax: return "SyntaxError";
    case Errc::kUnclosedRing: return "UnclosedRing";
    case Errc::kUnbalancedParenthesis: return "UnbalancedParenthesis";
    case Errc::kUnknownElement: return "UnknownElement";
    case Errc::kValenceViolation: return "ValenceViolation";
    case Errc::kInvalidBond: return "InvalidBond";
    case Errc::kInvalidCharge: return "InvalidCharge";
    case Errc::kInvalidDescriptors: return "InvalidDescriptors";
    case Errc::kUntypedAtom: return "UntypedAtom";
    case Errc::kInvalidConfig: return "InvalidConfig";
    case Errc::kConfigMismatch: return "ConfigMismatch";
    case Errc::kInvalidK: return "InvalidK";
    case Errc::kInvalidMatrix: return "InvalidMatrix";
    case Errc::kShapeMismatch: return "ShapeMismatch";
    case Errc::kLengthMismatch: return "LengthMismatch";
    case Errc::kNonPositiveIC50: return "NonPositiveIC50";
    case Errc::kTooFewRecords: return "TooFewRecords";
    case Errc::kInconsistentActivity: return "InconsistentActivity";
    case Errc::kFormat: return "FormatError";
    case Errc::kInsufficientTraining: return "InsufficientTraining";
    case Errc::kIo: return "IoError";
    case Errc::kEmptyActiveSet: return "EmptyActiveSet";
  }
  return "Unknown";
}

namespace {

constexpr std::array<int, 1> kV1{1};
constexpr std::array<int, 1> kV2{2};
constexpr std::array<int, 1> kV3{3};
constexpr std::array<int, 1> kV4{4};
constexpr std::array<int, 2> kV35{3, 5};
constexpr std::array<int, 3> kV246{2, 4, 6};

// Organic subset plus the counter-ions and metalloids commonly found in
// natural-product and salt-form records; those are bracket-only.
const std::array kElements{
    ElementInfo{1, "H", 1.008, {}, false, false},
    ElementInfo{3, "Li", 6.94, {}, false, false},
    ElementInfo{5, "B", 10.81, kV3, true, true},
    ElementInfo{6, "C", 12.011, kV4, true, true},
    ElementInfo{7, "N", 14.007, kV35, true, true},
    ElementInfo{8, "O", 15.999, kV2, true, true},
    ElementInfo{9, "F", 18.998, kV1, true, false},
    ElementInfo{11, "Na", 22.990, {}, false, false},
    ElementInfo{12, "Mg", 24.305, {}, false, false},
    ElementInfo{13, "Al", 26.982, {}, false, false},
    ElementInfo{14, "Si", 28.085, {}, false, false},
    ElementInfo{15, "P", 30.974, kV35, true, true},
    ElementInfo{16, "S", 32.06, kV246, true, true},
    ElementInfo{17, "Cl", 35.45, kV1, true, false},
    ElementInfo{19, "K", 39.098, {}, false, false},
    ElementInfo{20, "Ca", 40.078, {}, false, false},
    ElementInfo{26, "Fe", 55.845, {}, false, false},
    ElementInfo{30, "Zn", 65.38, {}, false, false},
    ElementInfo{34, "Se", 78.971, {}, false, false},
    ElementInfo{35, "Br", 79.904, kV1, true, false},
    ElementInfo{53, "I", 126.904, kV1, true, false},
};

}  // namespace

const ElementInfo* find_element(std::string_view symbol) {
  for (const auto& e : kElements) {
    if (e.symbol == symbol) return &e;
  }
  return nullptr;
}

const ElementInfo* find_element(int atomic_number) {
  for (const auto& e : kElements) {
    if (e.atomic_number == atomic_number) return &e;
  }
  return nullptr;
}

const ElementInfo& element(int atomic_number) {
  const ElementInfo* e = find_element(atomic_number);
  if (e == nullptr) {
    throw Error(Errc::kUnknownElement,
                "atomic number " + std::to_string(atomic_number));
  }
  return *e;
}

}  // namespace screenforge
