// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>

namespace sdelawson {

/// Run body(begin, end, chunk_index) over fixed-size chunks of [0, items),
/// distributed over `workers` threads. Chunk boundaries depend only on
/// chunk_size, so results written into per-item or per-chunk slots are
/// identical for any worker count. The first exception thrown by a body is
/// rethrown on the calling thread after all workers finish.
void parallel_chunks(std::int64_t items, std::int64_t chunk_size, int workers,
                     const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& body);

} // namespace sdelawson
