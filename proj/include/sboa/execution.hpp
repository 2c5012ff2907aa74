#pragma once

#include <exception>
#include <mutex>

namespace sboa {

// Kernels with an OpenMP path also keep a plain serial loop. The serial
// path is the reference the parallel one is tested against; both must give
// bitwise identical results.
enum class Execution { serial, parallel };

// Collects the exception of the lowest failing iteration of a parallel loop
// so it can be rethrown after the loop, as the serial loop would.
class LoopErrors {
public:
    template <class F>
    void run(long index, F&& f) {
        try {
            f();
        } catch (...) {
            std::lock_guard lock(mutex_);
            if (!error_ || index < index_) {
                error_ = std::current_exception();
                index_ = index;
            }
        }
    }
    void rethrow() const {
        if (error_) {
            std::rethrow_exception(error_);
        }
    }

private:
    std::mutex mutex_;
    std::exception_ptr error_;
    long index_ = 0;
};

} // namespace sboa
