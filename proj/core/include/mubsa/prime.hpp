#ifndef MUBSA_PRIME_HPP
#define MUBSA_PRIME_HPP

namespace mubsa {

/// True iff n is an odd prime (so 2 is excluded).
bool is_odd_prime(long long n);

/// Throws std::invalid_argument unless d is an odd prime >= 3.
void require_odd_prime(int d);

} // namespace mubsa

#endif // MUBSA_PRIME_HPP
