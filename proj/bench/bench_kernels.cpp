#include <benchmark/benchmark.h>

#include "padsteg/analyzer.hpp"
#include "padsteg/background.hpp"
#include "padsteg/warden.hpp"

using namespace padsteg;

namespace {

const std::vector<PcapRecord>& trace() {
    static const auto t = [] {
        BackgroundProfile p;
        p.padded_fraction = 0.5;
        return generate_background(p, from_seconds(6 * 3600), 3);
    }();
    return t;
}

std::vector<Bytes> frames() {
    std::vector<Bytes> out;
    for (const auto& r : trace()) out.push_back(r.data);
    return out;
}

void BM_stats_serial(benchmark::State& st) {
    trace();
    for (auto _ : st) benchmark::DoNotOptimize(compute_stats_serial(trace()).improper_frames);
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * trace().size()));
}

void BM_stats_parallel(benchmark::State& st) {
    trace();
    for (auto _ : st) benchmark::DoNotOptimize(compute_stats(trace()).improper_frames);
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * trace().size()));
}

template <WardenReport (*Kernel)(std::vector<Bytes>&)>
void BM_sanitize(benchmark::State& st) {
    const auto base = frames();
    for (auto _ : st) {
        st.PauseTiming();
        auto batch = base;
        st.ResumeTiming();
        benchmark::DoNotOptimize(Kernel(batch).frames_modified);
    }
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * base.size()));
}

}  // namespace

BENCHMARK(BM_stats_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_stats_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sanitize<sanitize_batch_serial>)->Name("BM_sanitize_serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sanitize<sanitize_batch>)->Name("BM_sanitize_parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
