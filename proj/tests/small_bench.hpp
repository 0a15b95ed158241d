#pragma once

#include "lrmt/benchmark.hpp"
#include "tmpdir.hpp"

// A benchmark small enough to run the whole schedule in well under a second.
inline lrmt::PipelineConfig small_benchmark(const TempDir& dir, std::uint64_t seed = 5) {
  lrmt::SynthConfig c;
  c.vocab_size = 150;
  c.seed = seed;
  lrmt::BenchmarkSizes sz;
  sz.hr_pivot = 1500;
  sz.lr_mono = 200;
  sz.hr_mono = 200;
  sz.lr_dev = 40;
  sz.lr_test = 40;
  sz.lr_hr = 80;
  return lrmt::write_benchmark(dir / "bench", c, sz);
}
