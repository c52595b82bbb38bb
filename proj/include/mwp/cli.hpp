#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "mwp/evalkit.hpp"
#include "mwp/expander.hpp"

namespace mwp::cli {

struct RunConfig {
    std::string backend = "replay";  // replay | record | http
    std::string fixtures;
    std::string base_url;
    std::string prompts_dir;
    GenerationConfig generation;
    int parallelism = 1;
    std::string tolerance = "0.001";
    std::string relative_tolerance = "0.0001";
    int k = 5;
    int retries = 3;
    std::string dataset;
    std::string demos;
    std::string out;
    std::string format = "md";
};

// Builds the backend named by `config`.  Throws PreconditionError when a
// replay or record run has no fixture file, or http has no credentials.
std::shared_ptr<Backend> make_backend(const RunConfig& config);

// Exit codes: 0 success, 1 pipeline error, 2 usage error.
int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace mwp::cli
