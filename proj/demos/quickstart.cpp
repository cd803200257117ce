// Walks through the library on the 12-cycle: averages, spectral data and the
// Van der Corput bound for a mean-zero indicator.

#include <wwlab/wwlab.hpp>

#include <cstdio>

int main() {
  using namespace wwlab;

  const int q = 12;
  const AlgebraCtx ctx = AlgebraCtx::make(q);
  const Dynamics shift = Dynamics::cyclic_shift(ctx);

  std::vector<double> f(q, -1.0 / q);
  f[0] += 1.0;
  const Operator x = Operator::diagonal(ctx, std::span<const double>(f));

  const DynamicsReport rep = validate(shift, 8, 1, Sector::Diagonal);
  std::printf("ergodic on the diagonal: %s, fixed space dim %d\n", rep.ergodic ? "yes" : "no", rep.fixed_space_dim);

  const LambdaGrid grid = LambdaGrid::uniform(256);
  for (int n : {10, 100, 1000}) {
    const UniformSup s = uniform_sup(shift, x, Projection::identity(ctx), n, grid, false, Sector::Diagonal);
    std::printf("n = %4d  sup_lambda ||a_n(x, lambda)|| = %.6f (grid slack %.2e)\n", n, s.value, s.lipschitz_slack);
  }

  const SpectralMeasure mu = spectral_measure(shift, x, Sector::Diagonal);
  std::printf("spectral measure: %zu atoms, total mass %.6f, sum of squared masses %.6f\n", mu.atoms.size(), mu.total,
              mu.sum_squared_masses());

  for (int m : {0, 4, 16}) {
    const WwBoundPoint pt = ww_bound_chain(shift, x, Projection::identity(ctx), 600, m, grid, Sector::Diagonal);
    std::printf("m = %2d  sup^2 = %.6f  <=  bound = %.6f\n", m, pt.uniform_sup_sq, pt.bound);
  }
  return 0;
}
