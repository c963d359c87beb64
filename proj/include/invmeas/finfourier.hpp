#pragma once

#include <random>
#include <string>
#include <vector>

#include "invmeas/core.hpp"

namespace invmeas {

// Finite group as a validated multiplication table over element indices.
// Haar measure throughout this module is the uniform probability 1/N, so
// integrals are (1/N)-weighted sums.
struct FiniteGroup {
  int n = 0;
  std::vector<std::vector<int>> mul;
  int identity = -1;
  std::vector<int> inv;
};

// Validates Latin-square, identity, inverse and associativity laws
// (associativity exhaustive for N <= 64, sampled above). Throws InvalidTable.
FiniteGroup make_group(std::vector<std::vector<int>> table);

// Closure of permutation generators (images over 0..k-1); throws InvalidTable
// when the closure exceeds cap.
FiniteGroup group_from_permutations(const std::vector<std::vector<int>>& gens,
                                    int cap = 2000);

FiniteGroup cyclic_group(int n);
FiniteGroup symmetric_group(int n);   // n <= 5
FiniteGroup dihedral_group_8();
FiniteGroup quaternion_group_8();
FiniteGroup alternating_group_4();

struct ConjClasses {
  std::vector<std::vector<int>> members;  // each sorted; classes ordered by minimum
  std::vector<int> representatives;
  std::vector<int> sizes;
  std::vector<int> class_of;  // element -> class index
};

ConjClasses conj_classes(const FiniteGroup& g);

struct CharacterTable {
  ConjClasses classes;
  CMat chi;               // irreps x classes
  std::vector<int> dims;  // chi(e), snapped to integers
};

// Burnside method: common eigenvectors of the commuting class-sum matrices,
// normalized at the identity class. Retries a fresh random combination on a
// degenerate spectrum and throws NumericalDegeneracy when that persists.
CharacterTable character_table(const FiniteGroup& g, int max_order = 2000);

// Projector (dim/N) sum_g conj(chi(g)) L(g) onto the isotypic component of
// irrep `alpha` inside the regular representation.
CMat isotypic_projector(const FiniteGroup& g, const CharacterTable& table,
                        int alpha);

struct Irrep {
  int dim = 0;
  std::vector<CMat> rho;  // one unitary matrix per element
};

// Splits the isotypic block by the spectral decomposition of a symmetrized
// random commutant element and restricts the regular action to one eigenblock.
// Throws SplitFailure after 10 failed draws.
Irrep extract_irrep(const FiniteGroup& g, const CharacterTable& table,
                    int alpha, std::mt19937_64& rng);

std::vector<Irrep> all_irreps(const FiniteGroup& g, const CharacterTable& table,
                              std::mt19937_64& rng);

// (f1 * f2)(g) = (1/N) sum_h f1(g h^{-1}) f2(h). The unit is N delta_e.
CVec convolve(const FiniteGroup& g, const CVec& f1, const CVec& f2);

using FourierImage = std::vector<CMat>;

// F f(alpha) = (1/N) sum_g f(g) rho_alpha(g); convolution becomes the matrix
// product F(f1) F(f2).
FourierImage fourier(const FiniteGroup& g, const std::vector<Irrep>& irreps,
                     const CVec& f);

// f(g) = sum_alpha dim_alpha tr(B_alpha rho_alpha(g)^{-1}).
CVec inverse_fourier(const FiniteGroup& g, const std::vector<Irrep>& irreps,
                     const FourierImage& image);

// JSON formats: {"table": [[...]]} or {"perm_generators": [[...], ...]}.
FiniteGroup group_from_json(const std::string& text);

// Classes (representative, size) plus dims and complex entries as [re, im].
std::string character_table_to_json(const CharacterTable& table);

}  // namespace invmeas
