#include "cli.hpp"

int main(int argc, char** argv) {
  return partmotion::cli::run(argc, argv);
}
