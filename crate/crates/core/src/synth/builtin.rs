use super::TopicSpec;

const FILLER: &[&str] = &[
    "the", "a", "an", "is", "was", "i", "you", "we", "they", "it", "that", "this", "about", "really", "think",
    "know", "like", "some", "more", "very", "just", "what", "how", "do", "did", "have", "had", "with", "for",
    "on", "in", "of", "to", "and", "but", "so", "my", "your", "there", "then", "maybe", "today", "thing",
    "things", "tell", "me", "any", "good", "new", "last",
];

const TOPICS: &[(&str, &[&str])] = &[
    (
        "Music",
        &["song", "album", "guitar", "concert", "singer", "band", "lyrics", "melody", "drummer", "playlist", "piano", "chorus"],
    ),
    (
        "Sports",
        &["game", "team", "score", "league", "coach", "braves", "playoffs", "stadium", "quarterback", "tournament", "goalie", "inning"],
    ),
    (
        "Politics",
        &["election", "senator", "congress", "president", "vote", "campaign", "policy", "parliament", "governor", "ballot", "democracy", "senate"],
    ),
    (
        "Movies",
        &["film", "actor", "director", "sequel", "cinema", "trailer", "oscar", "screenplay", "actress", "blockbuster", "premiere", "hollywood"],
    ),
    (
        "Science",
        &["physics", "chemistry", "experiment", "atom", "galaxy", "telescope", "biology", "molecule", "laboratory", "theory", "gravity", "quantum"],
    ),
    (
        "Food",
        &["recipe", "pizza", "restaurant", "chef", "pasta", "dessert", "cooking", "spicy", "breakfast", "sushi", "bakery", "flavor"],
    ),
    (
        "Travel",
        &["flight", "hotel", "vacation", "passport", "beach", "tourist", "luggage", "airport", "itinerary", "cruise", "island", "backpacking"],
    ),
    (
        "Technology",
        &["computer", "software", "smartphone", "robot", "internet", "laptop", "gadget", "programming", "algorithm", "processor", "startup", "app"],
    ),
];

/// Acknowledgement and chit-chat lines used for Phatic turns.
pub const PHATIC_PHRASES: &[&str] = &["ok", "cool", "nice", "i see", "thanks", "sure", "hello there", "yeah"];

/// The eight-topic set used by the default corpus and dialog generators.
pub fn builtin_topic_specs() -> Vec<TopicSpec> {
    TOPICS
        .iter()
        .map(|(name, keywords)| TopicSpec {
            name: name.to_string(),
            keywords: keywords.iter().map(|s| s.to_string()).collect(),
            filler: FILLER.iter().map(|s| s.to_string()).collect(),
            min_len: 4,
            max_len: 10,
        })
        .collect()
}
