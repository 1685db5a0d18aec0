#include <cstdlib>

#include "spinchain/acceptance.hpp"

int main() {
    const auto results = spinchain::run_acceptance();
    return spinchain::report_acceptance(results) == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
