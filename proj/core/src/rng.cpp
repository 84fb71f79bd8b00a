#include "advmask/rng.hpp"

#include <cmath>

#include "advmask/image.hpp"

namespace advmask {

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Guard the log against a zero draw.
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

Rng Rng::substream(std::string_view name) const {
    std::uint64_t h = fnv1a64(&seed_, sizeof(seed_));
    h = fnv1a64(name.data(), name.size(), h);
    return Rng(h);
}

Rng Rng::substream(std::string_view name, std::uint64_t index) const {
    std::uint64_t h = fnv1a64(&seed_, sizeof(seed_));
    h = fnv1a64(name.data(), name.size(), h);
    h = fnv1a64(&index, sizeof(index), h);
    return Rng(h);
}

}  // namespace advmask
