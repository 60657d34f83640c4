#pragma once

namespace mocco::harness {

// Entry point behind the mocco_lab binary; returns the process exit code.
int cli_main(int argc, char** argv);

}  // namespace mocco::harness
