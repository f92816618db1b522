// OpenMP kernels against their serial references.
#include <benchmark/benchmark.h>

#include <random>

#include "matrod/orthogonality.hpp"
#include "matrod/rodrigues.hpp"
#include "matrod/weights.hpp"

using namespace matrod;

namespace {

ModelSpec random_spec(int dim, int n_max)
{
    // Diagonally dominant L1 keeps L1 + k sigma far from singular.
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 0.3);
    Matrix l1(dim, dim), l2(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            l1(i, j) = Complex(g(rng), g(rng));
            l2(i, j) = Complex(g(rng), g(rng));
        }
    l1 -= 3.0 * identity(dim);
    return ModelSpec({1.0, 0.0, -1.0}, l1, l2, n_max);
}

ModelSpec noncommuting_laguerre()
{
    Matrix l1(3, 3), l2(3, 3);
    l1 << -1.0, 0.3, 0.0, 0.2, -0.8, 0.1, 0.0, 0.1, -1.3;
    l2 << 0.5, 0.4, 0.1, -0.3, 1.1, 0.0, 0.2, 0.0, 0.8;
    return ModelSpec({0.0, 1.0, 0.0}, l1, l2, 6);
}

template <FamilyCache (*Generate)(const ModelSpec&, int)>
void family(benchmark::State& state)
{
    const int dim = static_cast<int>(state.range(0));
    const int n = static_cast<int>(state.range(1));
    const ModelSpec spec = random_spec(dim, n);
    for (auto _ : state) benchmark::DoNotOptimize(Generate(spec, n));
}

template <GramReport (*Gram)(const FamilyCache&, const Weight&, GramVariant, double)>
void gram(benchmark::State& state)
{
    const ModelSpec spec = noncommuting_laguerre();
    const FamilyCache cache = generate_family(spec, spec.max_degree);
    const Weight w = Weight::frobenius(spec, Anchor::Zero);
    for (auto _ : state) benchmark::DoNotOptimize(Gram(cache, w, GramVariant::StarLeft, kDefaultQuadratureTol));
}

template <GridReport (*Grid)(const Weight&, const std::vector<double>&)>
void grid(benchmark::State& state)
{
    const ModelSpec spec = noncommuting_laguerre();
    const Weight w = Weight::frobenius(spec, Anchor::Zero);
    const std::vector<double> points = interior_grid(Interval::HalfLine, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(Grid(w, points));
}

} // namespace

BENCHMARK(family<generate_family>)->Args({2, 12})->Args({4, 12})->Args({8, 16})->Unit(benchmark::kMillisecond);
BENCHMARK(family<generate_family_serial>)->Args({2, 12})->Args({4, 12})->Args({8, 16})->Unit(benchmark::kMillisecond);
BENCHMARK(gram<gram_matrix>)->Unit(benchmark::kMillisecond);
BENCHMARK(gram<gram_matrix_serial>)->Unit(benchmark::kMillisecond);
BENCHMARK(grid<grid_checks>)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(grid<grid_checks_serial>)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
