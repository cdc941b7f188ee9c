#include "folab/series.hpp"

namespace folab {

Series<double> evaluate_at(const Series<Polynomial>& s, double t) {
    Series<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i](t);
    return out;
}

}  // namespace folab
