#include "invmeas/ewens.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "invmeas/errors.hpp"

namespace invmeas {

namespace {

using Wide = __int128;

Wide wide_gcd(Wide a, Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rat64 reduce(Wide num, Wide den) {
  if (den == 0) throw DomainError("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Wide g = wide_gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  constexpr Wide lim = 0x7fffffffffffffffll;
  if (num > lim || num < -lim || den > lim)
    throw DomainError("rational overflow");
  Rat64 r;
  r.num = static_cast<long long>(num);
  r.den = static_cast<long long>(den);
  return r;
}

void check_perm(const Perm& p) {
  if (!is_perm(p)) throw DomainError("not a permutation");
}

}  // namespace

Rat64 rat(long long num, long long den) { return reduce(num, den); }

Rat64 operator+(Rat64 a, Rat64 b) {
  return reduce(Wide(a.num) * b.den + Wide(b.num) * a.den, Wide(a.den) * b.den);
}

Rat64 operator-(Rat64 a, Rat64 b) {
  return reduce(Wide(a.num) * b.den - Wide(b.num) * a.den, Wide(a.den) * b.den);
}

Rat64 operator*(Rat64 a, Rat64 b) {
  return reduce(Wide(a.num) * b.num, Wide(a.den) * b.den);
}

Rat64 operator/(Rat64 a, Rat64 b) {
  return reduce(Wide(a.num) * b.den, Wide(a.den) * b.num);
}

bool operator==(Rat64 a, Rat64 b) { return a.num == b.num && a.den == b.den; }
bool operator!=(Rat64 a, Rat64 b) { return !(a == b); }

double to_double(Rat64 a) { return double(a.num) / double(a.den); }

bool is_perm(const Perm& p) {
  const int n = static_cast<int>(p.size());
  std::vector<char> seen(n, 0);
  for (int v : p) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

Perm perm_identity(int n) {
  Perm p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

Perm compose(const Perm& outer, const Perm& inner) {
  if (outer.size() != inner.size()) throw SizeMismatch("degree mismatch");
  Perm r(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) r[i] = outer[inner[i]];
  return r;
}

Perm inverse(const Perm& p) {
  Perm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[p[i]] = static_cast<int>(i);
  return r;
}

int num_cycles(const Perm& p) {
  check_perm(p);
  std::vector<char> seen(p.size(), 0);
  int c = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    ++c;
    for (int j = static_cast<int>(i); !seen[j]; j = p[j]) seen[j] = 1;
  }
  return c;
}

std::vector<std::vector<int>> cycles(const Perm& p) {
  check_perm(p);
  std::vector<char> seen(p.size(), 0);
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    std::vector<int> c;
    for (int j = static_cast<int>(i); !seen[j]; j = p[j]) {
      seen[j] = 1;
      c.push_back(j);
    }
    out.push_back(std::move(c));
  }
  return out;
}

Perm project_down(const Perm& p) {
  check_perm(p);
  const int n = static_cast<int>(p.size());
  if (n < 2) throw DomainError("degree must be at least 2");
  Perm q(n - 1);
  for (int i = 0; i < n - 1; ++i) q[i] = p[i] == n - 1 ? p[n - 1] : p[i];
  return q;
}

Perm project_down_cycle(const Perm& p) {
  check_perm(p);
  const int n = static_cast<int>(p.size());
  if (n < 2) throw DomainError("degree must be at least 2");
  std::vector<std::vector<int>> cs = cycles(p);
  Perm q(n - 1);
  for (const std::vector<int>& c : cs) {
    std::vector<int> kept;
    for (int v : c)
      if (v != n - 1) kept.push_back(v);
    for (std::size_t i = 0; i < kept.size(); ++i)
      q[kept[i]] = kept[(i + 1) % kept.size()];
  }
  return q;
}

Rat64 ewens_weight(const Perm& p, Rat64 t) {
  check_perm(p);
  if (t.num <= 0) throw DomainError("parameter must be positive");
  const int n = static_cast<int>(p.size());
  Rat64 w = rat(1);
  for (int c = num_cycles(p); c > 0; --c) w = w * t;
  for (int m = 0; m < n; ++m) w = w / (t + rat(m));
  return w;
}

double ewens_weight(const Perm& p, double t) {
  check_perm(p);
  if (!(t > 0.0)) throw DomainError("parameter must be positive");
  const int n = static_cast<int>(p.size());
  double w = std::pow(t, num_cycles(p));
  for (int m = 0; m < n; ++m) w /= t + m;
  return w;
}

Perm crp_extend(const Perm& p, double t, std::mt19937_64& rng) {
  check_perm(p);
  if (!(t > 0.0)) throw DomainError("parameter must be positive");
  const int m = static_cast<int>(p.size());
  Perm q(m + 1);
  std::copy(p.begin(), p.end(), q.begin());
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (m == 0 || unif(rng) < t / (t + m)) {
    q[m] = m;
    return q;
  }
  std::uniform_int_distribution<int> pick(0, m - 1);
  const int j = pick(rng);
  q[m] = q[j];
  q[j] = m;
  return q;
}

Perm sample_ewens(int n, double t, std::mt19937_64& rng) {
  if (n < 0) throw DomainError("negative degree");
  Perm p;
  for (int i = 0; i < n; ++i) p = crp_extend(p, t, rng);
  return p;
}

std::vector<Perm> all_permutations(int n) {
  Perm p = perm_identity(n);
  std::vector<Perm> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

bool pushforward_exact_check(int n, Rat64 t) {
  if (n < 2 || n > 8) throw DomainError("supported degrees are 2..8");
  std::map<Perm, Rat64> mass;
  for (const Perm& p : all_permutations(n)) {
    Perm q = project_down(p);
    auto [it, fresh] = mass.emplace(std::move(q), ewens_weight(p, t));
    if (!fresh) it->second = it->second + ewens_weight(p, t);
  }
  if (mass.size() != all_permutations(n - 1).size()) return false;
  for (const auto& [q, w] : mass)
    if (w != ewens_weight(q, t)) return false;
  return true;
}

bool pushforward_exact_check(int n, double t) {
  if (n < 2 || n > 8) throw DomainError("supported degrees are 2..8");
  std::map<Perm, double> mass;
  for (const Perm& p : all_permutations(n)) mass[project_down(p)] += ewens_weight(p, t);
  if (mass.size() != all_permutations(n - 1).size()) return false;
  for (const auto& [q, w] : mass)
    if (std::abs(w - ewens_weight(q, t)) > 1e-12) return false;
  return true;
}

double left_action_rn(const Perm& tau, const Perm& p, double t) {
  check_perm(tau);
  check_perm(p);
  if (!(t > 0.0)) throw DomainError("parameter must be positive");
  if (tau.size() > p.size()) throw SizeMismatch("translating degree too large");
  Perm embedded = perm_identity(static_cast<int>(p.size()));
  std::copy(tau.begin(), tau.end(), embedded.begin());
  if (!is_perm(embedded)) throw DomainError("embedding is not a permutation");
  return std::pow(t, num_cycles(compose(embedded, p)) - num_cycles(p));
}

}  // namespace invmeas
