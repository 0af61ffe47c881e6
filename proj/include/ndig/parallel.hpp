#pragma once

#include <cstddef>
#include <functional>

namespace ndig {

/// Splits [0, n) into contiguous chunks run on up to `threads` workers
/// (0 = hardware concurrency). Exceptions from workers are rethrown.
void parallel_for_chunks(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t begin, std::size_t end)>& body);

}  // namespace ndig
