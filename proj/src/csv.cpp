#include "fcba/csv.hpp"

#include <cstdio>

namespace fcba {

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_pcs_curve(std::ostream& out, const PcsCurve& curve) {
  out << "policy,checkpoint,pcs,stderr";
  for (std::size_t i = 1; i <= curve.k; ++i) out << ",p_" << i;
  out << '\n';
  for (const auto& pc : curve.curves) {
    const auto name = pc.policy.name();
    for (const auto& s : pc.points) {
      out << name << ',' << s.checkpoint << ',' << format_number(s.pcs) << ',' << format_number(s.std_error);
      for (double r : s.mean_ratios) out << ',' << format_number(r);
      out << '\n';
    }
  }
}

void write_summary(std::ostream& out, const PcsCurve& curve) {
  out << "policy,budget,pcs,stderr,true_best_ratio,mean_v0,sd_v0,mean_ldr,sd_ldr\n";
  for (const auto& pc : curve.curves) {
    const auto& s = pc.points.back();
    out << pc.policy.name() << ',' << s.checkpoint << ',' << format_number(s.pcs) << ','
        << format_number(s.std_error) << ',' << format_number(s.true_best_ratio);
    if (pc.posthoc) {
      const auto& h = *pc.posthoc;
      out << ',' << format_number(h.mean_v0) << ',' << format_number(h.sd_v0) << ',' << format_number(h.mean_ldr)
          << ',' << format_number(h.sd_ldr);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
}

void print_summary_table(std::ostream& out, const PcsCurve& curve) {
  char line[128];
  std::snprintf(line, sizeof line, "%-10s %8s %8s %9s %10s\n", "policy", "budget", "pcs", "stderr", "best_ratio");
  out << line;
  for (const auto& pc : curve.curves) {
    const auto& s = pc.points.back();
    std::snprintf(line, sizeof line, "%-10s %8lld %8.4f %9.5f %10.4f\n", pc.policy.name().c_str(),
                  static_cast<long long>(s.checkpoint), s.pcs, s.std_error, s.true_best_ratio);
    out << line;
  }
  out << "macro-replications: " << curve.macro_reps << '\n';
}

}  // namespace fcba
