#pragma once

#include <cstdint>
#include <functional>

namespace perc {

int hardware_workers();

// Splits [0, total) into `workers` contiguous shards and runs
// fn(shard_index, begin, end) on its own thread per shard. Results must be
// accumulated per shard and reduced afterwards in shard order, which keeps
// every output independent of the worker count.
void run_sharded(std::int64_t total, int workers, const std::function<void(int, std::int64_t, std::int64_t)>& fn);

}  // namespace perc
