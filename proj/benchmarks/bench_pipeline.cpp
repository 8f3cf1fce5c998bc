#include <benchmark/benchmark.h>

#include "cutpaste/bank.hpp"
#include "cutpaste/extraction.hpp"
#include "cutpaste/metrics.hpp"
#include "cutpaste/paste.hpp"
#include "cutpaste/rng.hpp"
#include "cutpaste/types.hpp"

using namespace cutpaste;

namespace {

SemanticMask make_mask(int side, int classes, std::uint64_t seed) {
  Rng rng(seed, 1);
  std::vector<std::uint8_t> values(static_cast<std::size_t>(side) * side);
  for (auto& v : values) v = static_cast<std::uint8_t>(rng.bounded(classes));
  return SemanticMask(side, side, std::move(values));
}

Raster make_raster(int side, int bands, std::uint64_t seed) {
  Rng rng(seed, 2);
  std::vector<float> data(static_cast<std::size_t>(side) * side * bands);
  for (auto& v : data) v = static_cast<float>(rng.next_double() * 255.0);
  return Raster(side, side, bands, std::move(data));
}

InstanceBank make_bank(int instances, std::uint64_t seed) {
  InstanceBank bank(ClassMap::numbered(6));
  Rng rng(seed, 3);
  for (int i = 0; i < instances; ++i) {
    const int h = 2 + static_cast<int>(rng.bounded(14));
    const int w = 2 + static_cast<int>(rng.bounded(14));
    InstanceRecord rec;
    rec.class_id = static_cast<std::uint8_t>(rng.bounded(6));
    rec.patch = make_raster(std::max(h, w), 4, seed + i);
    rec.patch = Raster(h, w, 4, std::vector<float>(rec.patch.samples().begin(),
                                                   rec.patch.samples().begin() + std::size_t(h) * w * 4));
    rec.mask = BinaryMask::filled(h, w, 1);
    rec.pixel_count = static_cast<std::uint64_t>(h) * w;
    rec.source_bbox = BBox{0, 0, h, w};
    bank.add(std::move(rec));
  }
  return bank;
}

void BM_ConnectedComponents(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const SemanticMask mask = make_mask(side, 6, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(connected_components(mask, 4));
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_ConnectedComponents)->Arg(64)->Arg(256)->Arg(1024);

void BM_ExtractInstances(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const Sample sample(make_raster(side, 4, 12), make_mask(side, 6, 13), "s", "a");
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_instances(sample, 4, 1));
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_ExtractInstances)->Arg(64)->Arg(256);

void BM_AugmentSample(benchmark::State& state) {
  const std::uint32_t n_paste = static_cast<std::uint32_t>(state.range(0));
  const Sample sample(make_raster(256, 4, 14), make_mask(256, 6, 15), "s", "a");
  const InstanceBank bank = make_bank(200, 16);
  AugmentConfig config;
  config.n_paste = n_paste;
  config.pre_paste_augment = true;
  config.post_augment = true;
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(augment_sample(sample, bank, config, derive_rng(1, 0, i++)));
  }
  state.SetItemsProcessed(state.iterations() * n_paste);
}
BENCHMARK(BM_AugmentSample)->Arg(10)->Arg(100)->Arg(1000);

void BM_ConfusionAccumulate(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const SemanticMask gt = make_mask(side, 6, 17);
  const SemanticMask pred = make_mask(side, 6, 18);
  for (auto _ : state) {
    ConfusionMatrix m(6);
    m.accumulate(gt, pred);
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_ConfusionAccumulate)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
