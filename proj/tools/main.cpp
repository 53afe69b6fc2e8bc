#include "idris/harness.hpp"

int main(int argc, char** argv) { return idris::run(argc, argv); }
