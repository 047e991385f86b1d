#include "eegfair/stats.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <numeric>

namespace eegfair {

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0)) throw Error(ErrorKind::InvalidArgument, "t distribution needs positive degrees of freedom");
  if (std::isnan(t)) throw Error(ErrorKind::InvalidArgument, "t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  // P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2)
  const double x = df / (df + t * t);
  return std::clamp(boost::math::ibeta(df / 2.0, 0.5, x), 0.0, 1.0);
}

TTestResult ttest_two_sample(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                             TTestMode mode) {
  if (a.size() < 2 || b.size() < 2)
    throw Error(ErrorKind::GroupTooSmall, "t-test needs at least two values per group (got " +
                                              std::to_string(a.size()) + " and " + std::to_string(b.size()) + ")");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double diff = a.mean() - b.mean();
  const double va = sample_variance(a);
  const double vb = sample_variance(b);

  TTestResult r;
  double se2 = 0.0;
  if (mode == TTestMode::pooled) {
    r.df = na + nb - 2.0;
    const double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / r.df;
    se2 = pooled * (1.0 / na + 1.0 / nb);
  } else {
    const double sa = va / na, sb = vb / nb;
    se2 = sa + sb;
    const double denom = sa * sa / (na - 1.0) + sb * sb / (nb - 1.0);
    r.df = denom > 0 ? se2 * se2 / denom : na + nb - 2.0;
  }
  if (se2 > 0) {
    r.t = diff / std::sqrt(se2);
  } else {
    r.t = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  r.p = student_t_two_sided_p(r.t, r.df);
  return r;
}

std::vector<bool> bh_fdr(const std::vector<double>& pvals, double q) {
  if (!(q > 0 && q <= 1)) throw Error(ErrorKind::InvalidArgument, "FDR level must lie in (0, 1]");
  for (std::size_t i = 0; i < pvals.size(); ++i)
    if (!(pvals[i] >= 0.0 && pvals[i] <= 1.0))
      throw Error(ErrorKind::InvalidP, "p-value " + std::to_string(i) + " outside [0, 1]");
  const std::size_t m = pvals.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pvals[a] < pvals[b]; });
  double cutoff = -1.0;
  for (std::size_t rank = m; rank >= 1; --rank) {
    const double p = pvals[order[rank - 1]];
    if (p <= static_cast<double>(rank) * q / static_cast<double>(m)) {
      cutoff = p;
      break;
    }
  }
  std::vector<bool> flags(m, false);
  for (std::size_t i = 0; i < m; ++i) flags[i] = pvals[i] <= cutoff;
  return flags;
}

}  // namespace eegfair
