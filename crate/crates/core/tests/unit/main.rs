mod builders;
mod certificates;
mod hypergraph;
mod kernel_affine;
mod kernel_eigen;
mod kernel_lp;
mod kernel_matrix;
mod kernel_sdp;
mod macrosim;
mod models_classical;
mod models_deterministic;
mod models_quantum;
mod models_reference;
