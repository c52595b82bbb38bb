#include <iostream>

#include "scenarios.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_fixtures <output-dir>\n";
        return 2;
    }
    try {
        mwp::testing::write_bundled_data(argv[1]);
    } catch (const std::exception& e) {
        std::cerr << "make_fixtures: " << e.what() << '\n';
        return 1;
    }
    for (const auto& name : mwp::testing::bundled_file_names()) std::cout << argv[1] << '/' << name << '\n';
    return 0;
}
