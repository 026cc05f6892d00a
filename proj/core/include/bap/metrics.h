#ifndef BAP_METRICS_H_
#define BAP_METRICS_H_

#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "bap/core_model.h"

namespace bap {

// Exact metric values. Converted to double only for reporting.
using Ratio = boost::rational<std::int64_t>;

double ToDouble(const Ratio& r);
std::string ToFractionString(const Ratio& r);  // "8/7"

// Site-level and factory-aggregated WMAPE of one day against the previous.
// site >= global always holds.
struct WmapePair {
  Ratio site;
  Ratio global;
  std::int64_t denominator = 0;  // total recipe units of the current day

  bool operator==(const WmapePair&) const = default;
};

// sum_{i,j} |cur(i,j) - prev(i,j)| / sum_{i,j} cur(i,j).
Ratio WmapeSite(const RecipeSiteMatrix& prev, const RecipeSiteMatrix& cur);

// sum_i |rowsum cur(i) - rowsum prev(i)| / sum_i rowsum cur(i).
Ratio WmapeGlobal(const RecipeSiteMatrix& prev, const RecipeSiteMatrix& cur);

WmapePair ComputeWmapePair(const RecipeSiteMatrix& prev,
                           const RecipeSiteMatrix& cur);

// Raw numerators, useful where the denominator is fixed.
std::int64_t SiteDeviation(const RecipeSiteMatrix& prev,
                           const RecipeSiteMatrix& cur);
std::int64_t GlobalDeviation(const RecipeSiteMatrix& prev,
                             const RecipeSiteMatrix& cur);

// site - global.
Ratio OptimalityGap(const WmapePair& pair);

// 100 * (before - after) / before. Throws MetricError when before == 0.
Ratio ImprovementPercent(const Ratio& before, const Ratio& after);

struct CurvePoint {
  int lead_day = 0;
  Ratio site;
  Ratio global;
  bool operator==(const CurvePoint&) const = default;
};

// Points ordered by strictly increasing lead day (toward LD3 = -3).
using HorizonCurve = std::vector<CurvePoint>;

enum class Series { kSite, kGlobal };

// Unit-width rectangle sum of the selected series.
Ratio HorizonArea(const HorizonCurve& curve, Series series);

}  // namespace bap

#endif  // BAP_METRICS_H_
