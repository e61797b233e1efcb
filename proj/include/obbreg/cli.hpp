#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "obbreg/errors.hpp"
#include "obbreg/loss.hpp"
#include "obbreg/types.hpp"

namespace obbreg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumeric = 3;

// Malformed user input; maps to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

// Divergence or other non-finite arithmetic; maps to exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

// One JSON-lines record: {"rbox": [cx, cy, w, h, theta_deg]} or
// {"quad": [x1, y1, ..., x4, y4]}, with optional "score" and "class_id".
struct BoxRecord {
  std::optional<std::array<double, 5>> rbox_deg;
  std::optional<std::array<double, 8>> quad;
  std::optional<double> score;
  std::optional<int> class_id;
};

BoxRecord parse_record(std::string_view text, std::string_view where);
std::vector<BoxRecord> parse_records(std::istream& in, std::string_view source);

// Ordered quad of a record (rbox records are converted, quad records
// re-ordered).
Quad record_quad(const BoxRecord& r, std::string_view where);
// Canonical rbox (radians); quad records must be rectangles.
RBox5 record_rbox(const BoxRecord& r, std::string_view where);

enum class ParamKind { FiveParam, EightParam };

struct FitOptions {
  ParamKind params{ParamKind::FiveParam};
  LossMode loss{LossMode::Modulated};
  int steps{2000};
  double lr{0.05};
  double eps{1e-6};
  LossConfig loss_cfg{};
};

struct FitStep {
  int step{0};
  double loss{0.0};
  double iou{0.0};
  Branch branch{Branch::Direct};
  std::vector<double> params;
};

struct FitResult {
  AnchorBox anchor;
  std::vector<FitStep> trajectory;
  std::optional<int> converged_step;
  // Lowest-loss iterate; subgradient steps on l1 terms are not monotone.
  std::size_t best_index{0};
  Quad final_quad;
  Quad best_quad;
};

/// Gradient descent from `reference` towards `gt` on encoded parameters,
/// using central finite differences of the selected loss. The anchor is the
/// axis-aligned envelope of the reference. Besides the last iterate the
/// result records the lowest-loss iterate (first one on ties). Throws
/// NumericError when the loss, its gradient or the decoded box becomes
/// non-finite.
FitResult fit(const RBox5& reference, const RBox5& gt, const FitOptions& opts);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace obbreg::cli
