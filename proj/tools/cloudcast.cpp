// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#include "cloudcast/cli.hpp"

int main(int argc, char** argv) { return cloudcast::cli::run(argc, argv); }
