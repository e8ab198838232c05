#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ldacs {

/// Fixed-depth shift register, zero-filled at construction.
template <class T>
class DelayLine {
public:
    explicit DelayLine(std::size_t depth) : buffer_(depth, T{}) {
        if (depth == 0) {
            throw std::invalid_argument("DelayLine: depth must be > 0");
        }
    }

    /// Shift in `value`; returns the value pushed `depth` steps ago.
    T push(const T& value) {
        T out = buffer_[head_];
        buffer_[head_] = value;
        head_ = (head_ + 1 == buffer_.size()) ? 0 : head_ + 1;
        return out;
    }

    /// Value pushed `age` steps ago; age 0 is the newest.
    const T& operator[](std::size_t age) const {
        const std::size_t newest = (head_ == 0) ? buffer_.size() - 1 : head_ - 1;
        return buffer_[(newest + buffer_.size() - age) % buffer_.size()];
    }

    std::size_t depth() const { return buffer_.size(); }

private:
    std::vector<T> buffer_;
    std::size_t head_ = 0;
};

}  // namespace ldacs
