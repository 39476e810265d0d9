// Walks through the main entry points on T^2 with 1-form fields.
#include <iostream>

#include "abdual/abdual.hpp"

using namespace abdual;

int main() {
  // A unit-norm smearing: the sin mode with k = (1, 1) along dx^1.
  SpectralForm beta(2, 1, 8);
  beta.set({Wavevector{1, 1}, Phase::kSin, 1}, 1.0);

  // O^4 in the p-form theory with R^2 = 1/2 dualises to He_4.
  const TheorySpec theory = TheorySpec::pform(2, 1, std::sqrt(0.5), 8);
  const PolynomialObservable o4 = PolynomialObservable::power(beta, 4);
  const DualResult dual = fourier_dual(o4, theory);
  std::cout << "dual(O^4) terms:\n";
  for (const auto& [e, c] : dual.observable.polynomial().terms()) std::cout << "  O~^" << e[0] << "  " << c << "\n";

  const DualResult back = inverse_fourier_dual(dual.observable, dual.theory);
  std::cout << "double dual equals O^4: " << std::boolalpha << (to_json(back.observable) == to_json(o4)) << "\n";

  // Three routes to <O^4>.
  std::cout << "<O^4> diagrams   " << expectation_diagrams(o4, theory).real() << "\n";
  std::cout << "<O^4> isserlis   " << moments_isserlis(o4, gaussian_sector(o4, theory)).real() << "\n";
  const MonteCarloResult mc = moments_montecarlo(o4, gaussian_sector(o4, theory), 200000, 7, 2);
  std::cout << "<O^4> montecarlo " << mc.estimate.real() << " +- " << mc.standard_error << "\n";

  // Expectation values agree across duality in the closed theories once the
  // smearing has a harmonic component.
  SpectralForm gamma = beta;
  gamma.set({Wavevector{}, Phase::kCos, 2}, 0.4);
  const PolynomialObservable o2 = PolynomialObservable::power(gamma, 2);
  const TheorySpec lift = TheorySpec::pform(2, 1, 0.8, 8);
  const PolynomialObservable o2_dual = fourier_dual(o2, lift).observable;
  const LatticeExpectation lhs =
      maxwell_expectation(restrict_to_closed(o2), TheorySpec::closed_pform(2, 1, 0.8, 8), 40.0);
  const LatticeExpectation rhs =
      maxwell_expectation(restrict_to_closed(o2_dual), TheorySpec::closed_pform(2, 1, 1.0 / 1.6, 8), 40.0);
  std::cout << "<r(O^2)>_R       " << lhs.value.real() << "  (tail " << lhs.tail_bound << ")\n";
  std::cout << "<r(dual)>_1/2R   " << rhs.value.real() << "  (tail " << rhs.tail_bound << ")\n";

  // Wilson loop around x^1 and its 't Hooft dual.
  const SmearedChain loop = smear_chain(CoordinateCycle{1, {0.0, 0.5}}, 2, 0.1, 32);
  const TheorySpec lift32 = TheorySpec::pform(2, 1, 0.6, 32);
  const ExponentialObservable w = ExponentialObservable::wilson(loop.smearing, 1.0);
  const ExponentialDual t = dual_exponential(w, lift32);
  const Complex w_value = expectation_exponential(w, TheorySpec::closed_pform(2, 1, 0.6, 32), 40.0).value;
  const TheorySpec closed_dual = TheorySpec::closed_pform(2, t.theory.degree, t.theory.coupling, 32);
  const Complex t_value = expectation_exponential(t.observable, closed_dual, 40.0).value;
  std::cout << "<W>              " << w_value.real() << "\n";
  std::cout << "prefactor * <T>  " << (t.prefactor * t_value).real() << "\n";
}
