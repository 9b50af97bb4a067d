#pragma once

#include <stdexcept>

namespace pignn {

// Failure categories with distinct CLI exit codes (see tools/).
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct divergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pignn
