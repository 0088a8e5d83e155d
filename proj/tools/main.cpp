#include "sciqa/cli.hpp"

int main(int argc, char** argv) {
    return sciqa::run_cli(argc, argv);
}
