#include "tta/core/rng.hpp"

#include <numeric>
#include <utility>

namespace tta {

std::vector<std::size_t> Rng::permutation(std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[index(i)]);
    }
    return order;
}

}  // namespace tta
