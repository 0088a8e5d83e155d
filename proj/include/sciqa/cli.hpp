#pragma once

#include "sciqa/backend.hpp"
#include "sciqa/config.hpp"

#include <memory>
#include <string>
#include <vector>

namespace sciqa {

// Operator entrypoint. Exit codes: 0 success, 1 domain error, 2 usage
// error. The transport parameter exists for tests that must prove a mock
// run performs zero network operations.
int run_cli(const std::vector<std::string>& args,
            std::shared_ptr<Transport> transport = nullptr);
int run_cli(int argc, char** argv);

}  // namespace sciqa
