#include "crgeo/chart.hpp"

#include <cmath>
#include <sstream>

namespace crgeo {

Chart::Chart(std::vector<Interval> bounds, std::string label) : bounds_(std::move(bounds)), label_(std::move(label)) {
    const int n = dim();
    if (n < 3 || n % 2 == 0) throw DomainError("chart dimension must be odd and at least 3");
    if (n > kMaxDim) throw DomainError("chart dimension exceeds supported maximum");
    for (const Interval& b : bounds_)
        if (!(b.lo < b.hi)) throw DomainError("chart bounds must define a nonempty open box");
}

bool Chart::contains(const Vec<double>& p) const {
    if (p.n != dim()) return false;
    for (int i = 0; i < p.n; ++i) {
        if (!std::isfinite(p[i])) return false;
        if (!(p[i] > bounds_[i].lo && p[i] < bounds_[i].hi)) return false;
    }
    return true;
}

void Chart::require_inside(const Vec<double>& p) const {
    if (contains(p)) return;
    std::ostringstream os;
    os << "point outside chart '" << label_ << "': (";
    for (int i = 0; i < p.n; ++i) os << (i ? ", " : "") << p[i];
    os << ")";
    throw DomainError(os.str());
}

}  // namespace crgeo
