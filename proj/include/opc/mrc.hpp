#pragma once

#include <string>
#include <vector>

#include "opc/geometry.hpp"

namespace opc {

struct MrcRuleSet {
  double min_width = 40.0;
  double min_spacing = 40.0;
  double eol_spacing = 45.0;
  double notch_spacing = 45.0;
  double jog_spacing = 45.0;
  double beta = 50.0;
};

enum class CheckKind { Spacing, Width };

struct CheckPair {
  int seg_a = -1, seg_b = -1;  // seg_a < seg_b
  CheckKind kind = CheckKind::Spacing;
  int axis = 0;    // 0: gap measured along x, 1: along y
  double gap = 0;  // perpendicular distance between midlines
};

// All parallel facing segment pairs with overlapping span and perpendicular
// gap in (0, search_radius]. Pairs whose outward normals point toward each
// other are spacing checks; pairs facing away (material between) are width
// checks. Deterministic order (seg_a, seg_b ascending).
std::vector<CheckPair> extract_check_pairs(const SegmentSet& segset,
                                           const MrcRuleSet& rules,
                                           double search_radius);

// tau = sigmoid(beta * (proj_delta - d_const)); 0.5 exactly at the rule
// distance, ~1 once the gap clears the rule.
double gate_factor(double proj_delta, double d_const, double beta);

Point velocity_gate(const Point& v, double proj_delta, double d_const, double beta);

struct Violation {
  CheckKind kind;
  int axis;
  double measured;
  double required;
  // overlap span of the offending pair
  double x0, y0, x1, y1;
};

// Independent brute-force checker over the merged mask geometry: measures
// every facing pair of maximal boundary edges and reports gaps below the rule
// (strict <). Shares no code with extract_check_pairs.
std::vector<Violation> check_violations(const SegmentSet& mask_geometry,
                                        const MrcRuleSet& rules);

std::string violations_to_json(const std::vector<Violation>& violations);

}  // namespace opc
