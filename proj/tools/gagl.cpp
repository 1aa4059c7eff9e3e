// Copyright (c) 2026 The gagl authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "gagl/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gagl::cli::run(std::move(args), std::cout, std::cerr);
}
