#include <benchmark/benchmark.h>

#include "slicegs/parallel_exec.hpp"
#include "slicegs/synth.hpp"

using namespace slicegs;

namespace {

const Frame& ssl_frame()
{
    static const Frame f = make_ssl_frame("ssl", ssl::decode_ssl_frame(synth::street_ssl_capture(7, 0)));
    return f;
}

const PointCloud& street_cloud()
{
    static const PointCloud c = synth::street_frame(synth::StreetSequence{}, 0).cloud;
    return c;
}

const Frame& street_frame()
{
    static const Frame f = make_mechanical_frame("street", street_cloud());
    return f;
}

MethodConfig method(MethodId id)
{
    MethodConfig m;
    m.id = id;
    return m;
}

// args: slices, units
void BM_DepthSsl(benchmark::State& state)
{
    const auto k = static_cast<std::size_t>(state.range(0));
    const auto p = static_cast<std::size_t>(state.range(1));
    const Frame& f = ssl_frame();
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_sliced(f, method(MethodId::Depth), k, p).mask.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.cloud.size()));
}
BENCHMARK(BM_DepthSsl)
    ->Args({1, 1})
    ->Args({5, 1})
    ->Args({5, 2})
    ->Args({5, 3})
    ->Args({5, 5})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_MethodStreet(benchmark::State& state)
{
    const auto id = static_cast<MethodId>(state.range(0));
    const auto k = static_cast<std::size_t>(state.range(1));
    const Frame& f = street_frame();
    state.SetLabel(to_string(id));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_sliced(f, method(id), k, 1).mask.data());
    }
}
BENCHMARK(BM_MethodStreet)
    ->ArgsProduct({{static_cast<int>(MethodId::Depth), static_cast<int>(MethodId::Ransac),
                    static_cast<int>(MethodId::Smrf)},
                   {1, 5}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_Projection(benchmark::State& state)
{
    const PointCloud& c = street_cloud();
    for (auto _ : state) {
        benchmark::DoNotOptimize(project_spherical(c).point_index.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * c.size()));
}
BENCHMARK(BM_Projection)->Unit(benchmark::kMillisecond);

void BM_SslDecode(benchmark::State& state)
{
    const ssl::SslRawFrame raw = synth::street_ssl_capture(7, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ssl::decode_ssl_frame(raw).cells().data());
    }
}
BENCHMARK(BM_SslDecode)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
