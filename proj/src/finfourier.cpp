#include "invmeas/finfourier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "invmeas/errors.hpp"

namespace invmeas {

namespace {

bool is_permutation_row(const std::vector<int>& row, int n) {
  std::vector<char> seen(n, 0);
  for (int v : row) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

void check_associativity(const FiniteGroup& g) {
  const int n = g.n;
  if (n <= 64) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (g.mul[g.mul[a][b]][c] != g.mul[a][g.mul[b][c]])
            throw InvalidTable("associativity fails");
    return;
  }
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (long trial = 0; trial < 1000000; ++trial) {
    const int a = pick(rng), b = pick(rng), c = pick(rng);
    if (g.mul[g.mul[a][b]][c] != g.mul[a][g.mul[b][c]])
      throw InvalidTable("associativity fails");
  }
}

struct TableBuildResult {
  CMat chi;
  std::vector<int> dims;
  bool ok = false;
};

TableBuildResult try_character_table(const FiniteGroup& g,
                                     const ConjClasses& cls,
                                     const std::vector<Mat>& class_mats,
                                     int identity_class,
                                     std::mt19937_64& rng) {
  const int r = static_cast<int>(cls.sizes.size());
  TableBuildResult out;

  std::uniform_real_distribution<double> unif(0.1, 1.0);
  Mat m = Mat::Zero(r, r);
  for (int i = 0; i < r; ++i) m += unif(rng) * class_mats[i];

  Eigen::EigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success) return out;
  CVec vals = es.eigenvalues();
  CMat vecs = es.eigenvectors();

  double scale = 1.0;
  for (int i = 0; i < r; ++i) scale = std::max(scale, std::abs(vals[i]));
  for (int a = 0; a < r; ++a)
    for (int b = a + 1; b < r; ++b)
      if (std::abs(vals[a] - vals[b]) < 1e-6 * scale) return out;

  out.chi = CMat::Zero(r, r);
  out.dims.resize(r);
  for (int a = 0; a < r; ++a) {
    CVec v = vecs.col(a);
    if (std::abs(v[identity_class]) < 1e-8) return out;
    v /= v[identity_class];
    double s = 0.0;
    for (int j = 0; j < r; ++j) s += std::norm(v[j]) / cls.sizes[j];
    const double d = std::sqrt(g.n / s);
    const int di = static_cast<int>(std::lround(d));
    if (di < 1 || std::abs(d - di) > 1e-6) return out;
    out.dims[a] = di;
    for (int j = 0; j < r; ++j) out.chi(a, j) = double(di) * v[j] / double(cls.sizes[j]);
  }

  int sq = 0;
  for (int d : out.dims) sq += d * d;
  if (sq != g.n) return out;

  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) {
      Cx acc = 0.0;
      for (int j = 0; j < r; ++j)
        acc += double(cls.sizes[j]) * out.chi(a, j) * std::conj(out.chi(b, j));
      acc /= double(g.n);
      if (std::abs(acc - (a == b ? 1.0 : 0.0)) > 1e-8) return out;
    }

  // Deterministic row order: dimension, then snapped entries.
  std::vector<int> order(r);
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](int a) {
    std::vector<long long> k;
    k.push_back(out.dims[a]);
    for (int j = 0; j < r; ++j) {
      k.push_back(std::llround(out.chi(a, j).real() * 1e6));
      k.push_back(std::llround(out.chi(a, j).imag() * 1e6));
    }
    return k;
  };
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return key(a) < key(b); });
  CMat chi = CMat::Zero(r, r);
  std::vector<int> dims(r);
  for (int a = 0; a < r; ++a) {
    chi.row(a) = out.chi.row(order[a]);
    dims[a] = out.dims[order[a]];
  }
  out.chi = std::move(chi);
  out.dims = std::move(dims);
  out.ok = true;
  return out;
}

}  // namespace

FiniteGroup make_group(std::vector<std::vector<int>> table) {
  FiniteGroup g;
  g.n = static_cast<int>(table.size());
  if (g.n == 0) throw InvalidTable("empty table");
  for (const auto& row : table)
    if (static_cast<int>(row.size()) != g.n || !is_permutation_row(row, g.n))
      throw InvalidTable("rows must be permutations of 0..N-1");
  for (int c = 0; c < g.n; ++c) {
    std::vector<int> col(g.n);
    for (int rr = 0; rr < g.n; ++rr) col[rr] = table[rr][c];
    if (!is_permutation_row(col, g.n))
      throw InvalidTable("columns must be permutations of 0..N-1");
  }
  g.mul = std::move(table);

  g.identity = -1;
  for (int e = 0; e < g.n; ++e) {
    bool ok = true;
    for (int x = 0; x < g.n && ok; ++x)
      ok = g.mul[e][x] == x && g.mul[x][e] == x;
    if (ok) {
      g.identity = e;
      break;
    }
  }
  if (g.identity < 0) throw InvalidTable("no identity element");

  g.inv.assign(g.n, -1);
  for (int x = 0; x < g.n; ++x) {
    for (int y = 0; y < g.n; ++y)
      if (g.mul[x][y] == g.identity && g.mul[y][x] == g.identity) {
        g.inv[x] = y;
        break;
      }
    if (g.inv[x] < 0) throw InvalidTable("missing inverse");
  }

  check_associativity(g);
  return g;
}

FiniteGroup group_from_permutations(const std::vector<std::vector<int>>& gens,
                                    int cap) {
  if (gens.empty()) throw InvalidTable("no generators");
  const int k = static_cast<int>(gens[0].size());
  for (const auto& p : gens)
    if (static_cast<int>(p.size()) != k || !is_permutation_row(p, k))
      throw InvalidTable("generators must be permutations of equal degree");

  std::vector<int> id(k);
  std::iota(id.begin(), id.end(), 0);
  std::map<std::vector<int>, int> index;
  std::vector<std::vector<int>> elems;
  index[id] = 0;
  elems.push_back(id);
  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (const auto& p : gens) {
      std::vector<int> q(k);
      for (int i = 0; i < k; ++i) q[i] = elems[head][p[i]];
      if (index.emplace(q, static_cast<int>(elems.size())).second) {
        elems.push_back(q);
        if (static_cast<int>(elems.size()) > cap)
          throw InvalidTable("closure exceeds cap");
      }
    }
  }

  const int n = static_cast<int>(elems.size());
  std::vector<std::vector<int>> table(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      std::vector<int> q(k);
      for (int i = 0; i < k; ++i) q[i] = elems[a][elems[b][i]];
      auto it = index.find(q);
      if (it == index.end()) throw InvalidTable("closure not closed");
      table[a][b] = it->second;
    }
  return make_group(std::move(table));
}

FiniteGroup cyclic_group(int n) {
  if (n < 1) throw InvalidTable("order must be positive");
  std::vector<std::vector<int>> table(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) table[a][b] = (a + b) % n;
  return make_group(std::move(table));
}

FiniteGroup symmetric_group(int n) {
  if (n < 1 || n > 5) throw InvalidTable("supported degrees are 1..5");
  if (n == 1) return cyclic_group(1);
  std::vector<int> swap01(n), cycle(n);
  std::iota(swap01.begin(), swap01.end(), 0);
  std::swap(swap01[0], swap01[1]);
  for (int i = 0; i < n; ++i) cycle[i] = (i + 1) % n;
  return group_from_permutations({swap01, cycle});
}

FiniteGroup dihedral_group_8() {
  return group_from_permutations({{1, 2, 3, 0}, {2, 1, 0, 3}});
}

FiniteGroup quaternion_group_8() {
  // Element 2u+s is (-1)^s times the unit u in {1, i, j, k}.
  // i*j = k cyclically; reversed order and squares pick up the minus sign.
  const int unit_mul[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  const int unit_sign[4][4] = {{0, 0, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 0, 1, 1}};
  std::vector<std::vector<int>> table(8, std::vector<int>(8));
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      const int ua = a / 2, sa = a % 2, ub = b / 2, sb = b % 2;
      table[a][b] = 2 * unit_mul[ua][ub] + (sa + sb + unit_sign[ua][ub]) % 2;
    }
  return make_group(std::move(table));
}

FiniteGroup alternating_group_4() {
  return group_from_permutations({{1, 2, 0, 3}, {1, 0, 3, 2}});
}

ConjClasses conj_classes(const FiniteGroup& g) {
  ConjClasses out;
  out.class_of.assign(g.n, -1);
  for (int rep = 0; rep < g.n; ++rep) {
    if (out.class_of[rep] >= 0) continue;
    const int c = static_cast<int>(out.members.size());
    std::vector<int> orbit;
    for (int x = 0; x < g.n; ++x) {
      const int y = g.mul[g.mul[x][rep]][g.inv[x]];
      if (out.class_of[y] < 0) {
        out.class_of[y] = c;
        orbit.push_back(y);
      } else if (out.class_of[y] != c) {
        throw InvalidTable("conjugation does not partition");
      }
    }
    std::sort(orbit.begin(), orbit.end());
    out.representatives.push_back(orbit.front());
    out.sizes.push_back(static_cast<int>(orbit.size()));
    out.members.push_back(std::move(orbit));
  }
  return out;
}

CharacterTable character_table(const FiniteGroup& g, int max_order) {
  if (g.n > max_order) throw DomainError("group order exceeds bound");
  ConjClasses cls = conj_classes(g);
  const int r = static_cast<int>(cls.sizes.size());
  const int identity_class = cls.class_of[g.identity];

  // Class-sum product coefficients: C_i C_j = sum_k c_ijk C_k, read off by
  // counting products into each class and dividing by its size.
  std::vector<Mat> class_mats(r, Mat::Zero(r, r));
  for (int i = 0; i < r; ++i) {
    Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(r, r);
    for (int j = 0; j < r; ++j)
      for (int x : cls.members[i])
        for (int y : cls.members[j]) ++counts(j, cls.class_of[g.mul[x][y]]);
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k)
        class_mats[i](j, k) = double(counts(j, k)) / double(cls.sizes[k]);
  }

  std::mt19937_64 rng(0xC0FFEEull + g.n);
  for (int attempt = 0; attempt < 20; ++attempt) {
    TableBuildResult res =
        try_character_table(g, cls, class_mats, identity_class, rng);
    if (res.ok) {
      CharacterTable t;
      t.classes = std::move(cls);
      t.chi = std::move(res.chi);
      t.dims = std::move(res.dims);
      return t;
    }
  }
  throw NumericalDegeneracy("class algebra spectrum would not separate");
}

CMat isotypic_projector(const FiniteGroup& g, const CharacterTable& table,
                        int alpha) {
  if (alpha < 0 || alpha >= static_cast<int>(table.dims.size()))
    throw DomainError("irrep index out of range");
  const double d = table.dims[alpha];
  CMat p = CMat::Zero(g.n, g.n);
  for (int elem = 0; elem < g.n; ++elem) {
    const Cx c = d / double(g.n) *
                 std::conj(table.chi(alpha, table.classes.class_of[elem]));
    for (int y = 0; y < g.n; ++y) p(g.mul[elem][y], y) += c;
  }
  return p;
}

Irrep extract_irrep(const FiniteGroup& g, const CharacterTable& table,
                    int alpha, std::mt19937_64& rng) {
  const int d = table.dims[alpha];
  const int m = d * d;
  const CMat p = isotypic_projector(g, table, alpha);

  Eigen::SelfAdjointEigenSolver<CMat> pes(p);
  if (pes.info() != Eigen::Success)
    throw NumericalDegeneracy("projector eigensolver failed");
  if (pes.eigenvalues()[g.n - m] < 0.9 ||
      (g.n > m && pes.eigenvalues()[g.n - m - 1] > 0.1))
    throw NumericalDegeneracy("projector rank is not dim^2");
  const CMat q = pes.eigenvectors().rightCols(m);

  // Restriction of the regular action to the isotypic block; unitary because
  // the block is invariant. Row x of L(g) Q is row g^{-1} x of Q.
  std::vector<CMat> restricted(g.n);
  for (int elem = 0; elem < g.n; ++elem) {
    CMat lq(g.n, m);
    for (int x = 0; x < g.n; ++x) lq.row(x) = q.row(g.mul[g.inv[elem]][x]);
    restricted[elem] = q.adjoint() * lq;
  }

  std::normal_distribution<double> nd;
  for (int attempt = 0; attempt < 10; ++attempt) {
    CMat x(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) x(a, b) = Cx(nd(rng), nd(rng));
    CMat herm = x + x.adjoint();
    CMat avg = CMat::Zero(m, m);
    for (int elem = 0; elem < g.n; ++elem)
      avg += restricted[elem] * herm * restricted[elem].adjoint();
    avg /= double(g.n);

    Eigen::SelfAdjointEigenSolver<CMat> aes((CMat(0.5 * (avg + avg.adjoint()))));
    if (aes.info() != Eigen::Success) continue;
    const Vec ev = aes.eigenvalues();
    const double scale = 1.0 + ev.cwiseAbs().maxCoeff();

    int lo = -1;
    for (int start = 0; start + d <= m; ++start) {
      const bool tight = ev[start + d - 1] - ev[start] < 1e-7 * scale;
      const bool below = start == 0 || ev[start] - ev[start - 1] > 1e-5 * scale;
      const bool above =
          start + d == m || ev[start + d] - ev[start + d - 1] > 1e-5 * scale;
      if (tight && below && above) {
        lo = start;
        break;
      }
    }
    if (lo < 0) continue;
    const CMat w = aes.eigenvectors().middleCols(lo, d);

    Irrep rep;
    rep.dim = d;
    rep.rho.resize(g.n);
    bool good = true;
    for (int elem = 0; elem < g.n && good; ++elem) {
      rep.rho[elem] = w.adjoint() * restricted[elem] * w;
      good = (rep.rho[elem].adjoint() * rep.rho[elem] - CMat::Identity(d, d))
                 .cwiseAbs()
                 .maxCoeff() < 1e-8;
      if (good) {
        const Cx tr = rep.rho[elem].trace();
        good = std::abs(tr - table.chi(alpha, table.classes.class_of[elem])) <
               1e-7;
      }
    }
    for (int a = 0; a < g.n && good; ++a)
      for (int b = 0; b < g.n && good; ++b)
        good = (rep.rho[a] * rep.rho[b] - rep.rho[g.mul[a][b]])
                   .cwiseAbs()
                   .maxCoeff() < 1e-7;
    if (good) return rep;
  }
  throw SplitFailure("could not isolate an irreducible block");
}

std::vector<Irrep> all_irreps(const FiniteGroup& g, const CharacterTable& table,
                              std::mt19937_64& rng) {
  std::vector<Irrep> out;
  out.reserve(table.dims.size());
  for (int alpha = 0; alpha < static_cast<int>(table.dims.size()); ++alpha)
    out.push_back(extract_irrep(g, table, alpha, rng));
  return out;
}

CVec convolve(const FiniteGroup& g, const CVec& f1, const CVec& f2) {
  if (f1.size() != g.n || f2.size() != g.n)
    throw SizeMismatch("function length must equal group order");
  CVec out = CVec::Zero(g.n);
  for (int elem = 0; elem < g.n; ++elem) {
    Cx acc = 0.0;
    for (int h = 0; h < g.n; ++h) acc += f1[g.mul[elem][g.inv[h]]] * f2[h];
    out[elem] = acc / double(g.n);
  }
  return out;
}

FourierImage fourier(const FiniteGroup& g, const std::vector<Irrep>& irreps,
                     const CVec& f) {
  if (f.size() != g.n) throw SizeMismatch("function length must equal group order");
  FourierImage image;
  image.reserve(irreps.size());
  for (const Irrep& rep : irreps) {
    CMat b = CMat::Zero(rep.dim, rep.dim);
    for (int elem = 0; elem < g.n; ++elem) b += f[elem] * rep.rho[elem];
    image.push_back(b / double(g.n));
  }
  return image;
}

CVec inverse_fourier(const FiniteGroup& g, const std::vector<Irrep>& irreps,
                     const FourierImage& image) {
  if (image.size() != irreps.size())
    throw SizeMismatch("one block per irrep required");
  CVec f = CVec::Zero(g.n);
  for (std::size_t a = 0; a < irreps.size(); ++a) {
    const Irrep& rep = irreps[a];
    if (image[a].rows() != rep.dim || image[a].cols() != rep.dim)
      throw SizeMismatch("block shape must match irrep dimension");
    for (int elem = 0; elem < g.n; ++elem)
      f[elem] += double(rep.dim) *
                 (image[a] * rep.rho[elem].adjoint()).trace();
  }
  return f;
}

FiniteGroup group_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    throw InvalidTable("malformed JSON");
  }
  try {
    if (j.contains("table"))
      return make_group(j.at("table").get<std::vector<std::vector<int>>>());
    if (j.contains("perm_generators"))
      return group_from_permutations(
          j.at("perm_generators").get<std::vector<std::vector<int>>>());
  } catch (const nlohmann::json::exception&) {
    throw InvalidTable("wrong field types");
  }
  throw InvalidTable("expected \"table\" or \"perm_generators\"");
}

std::string character_table_to_json(const CharacterTable& table) {
  nlohmann::json j;
  j["classes"] = nlohmann::json::array();
  for (std::size_t c = 0; c < table.classes.sizes.size(); ++c)
    j["classes"].push_back({{"representative", table.classes.representatives[c]},
                            {"size", table.classes.sizes[c]}});
  j["dims"] = table.dims;
  j["chi"] = nlohmann::json::array();
  for (int a = 0; a < table.chi.rows(); ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (int b = 0; b < table.chi.cols(); ++b)
      row.push_back({table.chi(a, b).real(), table.chi(a, b).imag()});
    j["chi"].push_back(row);
  }
  return j.dump(2);
}

}  // namespace invmeas
