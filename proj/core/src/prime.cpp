#include "mubsa/prime.hpp"

#include <stdexcept>
#include <string>

namespace mubsa {

bool is_odd_prime(long long n) {
    if (n < 3 || n % 2 == 0) return false;
    for (long long f = 3; f * f <= n; f += 2) {
        if (n % f == 0) return false;
    }
    return true;
}

void require_odd_prime(int d) {
    if (!is_odd_prime(d)) {
        throw std::invalid_argument("dimension " + std::to_string(d) +
                                    " is not an odd prime");
    }
}

} // namespace mubsa
