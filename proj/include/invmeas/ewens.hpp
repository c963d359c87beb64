#pragma once

#include <random>
#include <vector>

#include "invmeas/core.hpp"

namespace invmeas {

// Exact rational with 64-bit numerator and denominator, always normalized
// (gcd 1, positive denominator). Arithmetic runs through 128-bit
// intermediates and throws DomainError when a reduced value leaves 64 bits.
struct Rat64 {
  long long num = 0;
  long long den = 1;
};

Rat64 rat(long long num, long long den = 1);
Rat64 operator+(Rat64 a, Rat64 b);
Rat64 operator-(Rat64 a, Rat64 b);
Rat64 operator*(Rat64 a, Rat64 b);
Rat64 operator/(Rat64 a, Rat64 b);
bool operator==(Rat64 a, Rat64 b);
bool operator!=(Rat64 a, Rat64 b);
double to_double(Rat64 a);

// Permutation of {0..n-1} in one-line form: p[i] is the image of i.
using Perm = std::vector<int>;

bool is_perm(const Perm& p);
Perm perm_identity(int n);
Perm compose(const Perm& outer, const Perm& inner);  // (outer*inner)(i) = outer(inner(i))
Perm inverse(const Perm& p);
int num_cycles(const Perm& p);

// Canonical cycle form: each cycle starts at its minimum, cycles sorted by
// those leaders.
std::vector<std::vector<int>> cycles(const Perm& p);

// Projection S_n -> S_{n-1} dropping the last point: positions mapping to
// n-1 are rerouted to its image. Equals deleting n-1 from its cycle.
Perm project_down(const Perm& p);
Perm project_down_cycle(const Perm& p);  // independent cycle-surgery route

// t^{#cycles} / prod_{m=0}^{n-1} (t+m).
Rat64 ewens_weight(const Perm& p, Rat64 t);
double ewens_weight(const Perm& p, double t);

// One Chinese-restaurant step S_m -> S_{m+1}: the new point opens a cycle
// with probability t/(t+m), otherwise lands right after a uniform old point.
Perm crp_extend(const Perm& p, double t, std::mt19937_64& rng);

Perm sample_ewens(int n, double t, std::mt19937_64& rng);

// Verifies sum_{p: project(p)=q} w_n(p) = w_{n-1}(q) for every q, exactly in
// rationals (or to 1e-12 in the double overload). Requires 2 <= n <= 8.
bool pushforward_exact_check(int n, Rat64 t);
bool pushforward_exact_check(int n, double t);

// Density of left translation by tau (embedded from S_k, k <= n) with
// respect to the Ewens measure: t^{cycles(tau p) - cycles(p)}.
double left_action_rn(const Perm& tau, const Perm& p, double t);

std::vector<Perm> all_permutations(int n);

}  // namespace invmeas
