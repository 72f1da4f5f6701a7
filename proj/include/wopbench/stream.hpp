#pragma once

#include <cstddef>
#include <deque>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

namespace wopbench {

/// A lazily generated, memoized infinite sequence.
///
/// The producer is invoked exactly once per index, in increasing order, so
/// stateful (staged) producers are allowed. Copies share the memo. Access is
/// serialized by a recursive mutex, so concurrent readers are safe and a
/// producer may read other streams (or earlier entries of this one).
/// A producer that throws poisons the stream at that index: every later
/// access past that point rethrows the same exception.
template <typename T>
class Stream {
public:
    using Producer = std::function<T(std::size_t)>;

    Stream() = default;
    explicit Stream(Producer producer) : state_(std::make_shared<State>(std::move(producer))) {}

    static Stream from_function(std::function<T(std::size_t)> f) { return Stream(std::move(f)); }

    bool valid() const { return state_ != nullptr; }

    const T& at(std::size_t i) const {
        std::lock_guard lock(state_->mutex);
        while (state_->cache.size() <= i) {
            if (state_->failure) std::rethrow_exception(state_->failure);
            try {
                state_->cache.push_back(state_->produce(state_->cache.size()));
            } catch (...) {
                state_->failure = std::current_exception();
                throw;
            }
        }
        return state_->cache[i];
    }

    const T& operator[](std::size_t i) const { return at(i); }

    std::vector<T> take(std::size_t n) const {
        std::vector<T> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(at(i));
        return out;
    }

    /// Number of entries materialized so far.
    std::size_t observed() const {
        std::lock_guard lock(state_->mutex);
        return state_->cache.size();
    }

    template <typename F>
    auto map(F f) const -> Stream<std::invoke_result_t<F, const T&>> {
        using U = std::invoke_result_t<F, const T&>;
        Stream self = *this;
        return Stream<U>([self, f](std::size_t i) { return f(self.at(i)); });
    }

private:
    struct State {
        explicit State(Producer p) : produce(std::move(p)) {}
        std::recursive_mutex mutex;
        Producer produce;
        std::deque<T> cache;
        std::exception_ptr failure;
    };

    std::shared_ptr<State> state_;
};

}  // namespace wopbench
