#pragma once

#include <ostream>
#include <string>

#include "fcba/experiment.hpp"

namespace fcba {

/// Shortest form that still round-trips: 17 significant digits.
std::string format_number(double x);

/// policy,checkpoint,pcs,stderr,p_1,...,p_k
void write_pcs_curve(std::ostream& out, const PcsCurve& curve);
/// One row per policy at the final checkpoint, plus plug-in estimate summaries when collected.
void write_summary(std::ostream& out, const PcsCurve& curve);
/// Fixed-width console table of the final checkpoint.
void print_summary_table(std::ostream& out, const PcsCurve& curve);

}  // namespace fcba
