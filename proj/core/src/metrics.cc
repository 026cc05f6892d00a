#include "bap/metrics.h"

#include <cstdlib>

namespace bap {
namespace {

void CheckShapes(const RecipeSiteMatrix& prev, const RecipeSiteMatrix& cur) {
  if (prev.n_recipes() != cur.n_recipes() ||
      prev.n_factories() != cur.n_factories()) {
    throw MetricError("recipe-site matrices differ in shape");
  }
}

std::int64_t Denominator(const RecipeSiteMatrix& cur) {
  const std::int64_t total = cur.Total();
  if (total <= 0) throw MetricError("current day has no recipe units");
  return total;
}

}  // namespace

double ToDouble(const Ratio& r) {
  return static_cast<double>(r.numerator()) /
         static_cast<double>(r.denominator());
}

std::string ToFractionString(const Ratio& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::int64_t SiteDeviation(const RecipeSiteMatrix& prev,
                           const RecipeSiteMatrix& cur) {
  CheckShapes(prev, cur);
  std::int64_t sum = 0;
  auto a = cur.data();
  auto b = prev.data();
  for (std::size_t k = 0; k < a.size(); ++k) sum += std::llabs(a[k] - b[k]);
  return sum;
}

std::int64_t GlobalDeviation(const RecipeSiteMatrix& prev,
                             const RecipeSiteMatrix& cur) {
  CheckShapes(prev, cur);
  std::int64_t sum = 0;
  for (int i = 0; i < cur.n_recipes(); ++i) {
    std::int64_t row = 0;
    for (int j = 0; j < cur.n_factories(); ++j) {
      row += cur.cell(i, j) - prev.cell(i, j);
    }
    sum += std::llabs(row);
  }
  return sum;
}

Ratio WmapeSite(const RecipeSiteMatrix& prev, const RecipeSiteMatrix& cur) {
  const std::int64_t num = SiteDeviation(prev, cur);
  return Ratio(num, Denominator(cur));
}

Ratio WmapeGlobal(const RecipeSiteMatrix& prev, const RecipeSiteMatrix& cur) {
  const std::int64_t num = GlobalDeviation(prev, cur);
  return Ratio(num, Denominator(cur));
}

WmapePair ComputeWmapePair(const RecipeSiteMatrix& prev,
                           const RecipeSiteMatrix& cur) {
  WmapePair pair;
  pair.denominator = Denominator(cur);
  pair.site = Ratio(SiteDeviation(prev, cur), pair.denominator);
  pair.global = Ratio(GlobalDeviation(prev, cur), pair.denominator);
  return pair;
}

Ratio OptimalityGap(const WmapePair& pair) { return pair.site - pair.global; }

Ratio ImprovementPercent(const Ratio& before, const Ratio& after) {
  if (before.numerator() == 0) {
    throw MetricError("improvement undefined for a zero initial objective");
  }
  return Ratio(100) * (before - after) / before;
}

Ratio HorizonArea(const HorizonCurve& curve, Series series) {
  if (curve.empty()) throw MetricError("empty horizon curve");
  Ratio area(0);
  for (const CurvePoint& p : curve) {
    area += series == Series::kSite ? p.site : p.global;
  }
  return area;
}

}  // namespace bap
