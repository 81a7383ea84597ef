#pragma once

#include <string>

#include "rlab/bounds.hpp"
#include "rlab/isoperimetry.hpp"
#include "rlab/lipschitz.hpp"
#include "rlab/margin.hpp"
#include "rlab/sweep.hpp"

namespace rlab {

// JSON bodies for the CLI reports; key order is fixed so identical inputs
// produce identical bytes.
std::string stability_report_json(const StabilityReport& report, const Network& net,
                                  bool include_per_sample = true);
std::string costability_report_json(const CoStabilityReport& report,
                                    const Network& net);
std::string lipschitz_report_json(const LipschitzInterval& interval);
std::string bound_result_json(const BoundResult& result);
std::string comparison_json(const BoundComparison& cmp);
std::string concentration_report_json(const ConcentrationReport& report,
                                      const MeasureSpec& measure);
std::string law_verdicts_json(const std::vector<LawVerdict>& verdicts, double eps,
                              double K, double R_star_proxy);

}  // namespace rlab
