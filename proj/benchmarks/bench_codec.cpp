#include <benchmark/benchmark.h>

#include "mergecoord/bsm.hpp"

using namespace mergecoord;

namespace {

ProtocolMessage sample_proposal() {
  ProtocolMessage msg;
  msg.tag = MessageTag::MergeProposal;
  msg.header = {1, 42, 1000, 80000, 0, 2600, 9000};
  MergePlanWire plan;
  plan.plan_id = 0x10001;
  plan.master_id = 1;
  plan.plan_epoch_ms = 1000;
  plan.entries = {{2, 8115, 8115}, {1, 8615, 10115}, {3, 10701, 12115}};
  msg.plan = plan;
  return msg;
}

}  // namespace

static void BM_EncodeProposal(benchmark::State& state) {
  const ProtocolMessage msg = sample_proposal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode_frame(msg));
  }
}
BENCHMARK(BM_EncodeProposal);

static void BM_DecodeProposal(benchmark::State& state) {
  const ByteBuffer frame = encode_frame(sample_proposal());
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode_frame(frame));
  }
}
BENCHMARK(BM_DecodeProposal);

BENCHMARK_MAIN();
