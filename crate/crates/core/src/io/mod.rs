//! File formats: meshes, cochain/chain text files and VTK output.

mod cochain;
mod vtk;

pub use crate::complex::io::{load_complex, parse_native_json, parse_node_ele, parse_off, MeshFormat, NativeMesh};
pub use cochain::{format_cochain, parse_cochains, read_cochains, write_cochains, Block, BlockKind};
pub use vtk::{proxy_vectors, write_vtk, vtk_string};
