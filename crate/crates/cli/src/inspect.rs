use wsi_core::dive::DiveEmbedding;
use wsi_core::egograph::{build_ego_network, top_words};
use wsi_core::senses::InduceConfig;
use wsi_core::speccluster::spectral_cluster;
use wsi_core::Error;

/// Text table of a word's sense clusters: for each cluster, the `bases` bases
/// with the highest value in the word's DIVE row, each described by its top
/// `words` words.
pub fn render(dive: &DiveEmbedding, word: &str, cfg: &InduceConfig, bases: usize, words: usize) -> Result<String, Error> {
    let q = dive.id_of(word).ok_or_else(|| Error::UnknownWord(word.to_string()))?;
    let network = build_ego_network(dive, q, &cfg.ego())?;
    let assignment = spectral_cluster(&network.adjacency, cfg.k, cfg.seed)?;
    let w_q = dive.row(q);
    let mut out = format!(
        "query: {word}  nodes: {}  T: {}\n",
        network.nodes.len(),
        wsi_core::math::fmt_g6(network.threshold)
    );
    out.push_str("CID  basis  w_q       top words\n");
    for (k, members) in assignment.clusters().iter().enumerate() {
        let mut ranked: Vec<usize> = members.iter().map(|&i| network.nodes[i]).collect();
        ranked.sort_by(|&a, &b| w_q[b].total_cmp(&w_q[a]).then(a.cmp(&b)));
        for (r, &b) in ranked.iter().take(bases).enumerate() {
            let list: Vec<&str> = top_words(dive, b, words).into_iter().map(|id| dive.word(id)).collect();
            let cid = if r == 0 { (k + 1).to_string() } else { String::new() };
            out.push_str(&format!(
                "{cid:<4} {b:<6} {:<9} {}\n",
                wsi_core::math::fmt_g6(w_q[b]),
                list.join(", ")
            ));
        }
    }
    Ok(out)
}
