#include "scoredens/stats.hpp"

#include <algorithm>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace scoredens {

double integrate(const std::function<double(double)>& f, double a, double b) {
  if (!(a <= b)) throw std::invalid_argument("integrate: a > b");
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13);
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  std::nth_element(values.begin(), values.begin() + mid - 1, values.begin() + mid);
  return 0.5 * (values[mid - 1] + hi);
}

}  // namespace scoredens
