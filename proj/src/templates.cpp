#include "screenkit/taskgen.hpp"

namespace screenkit {

namespace {

const char* k_screen_qa_body = R"BODY(You only speak JSON. Do not write text that isn't JSON. 
You are given the following mobile screenshot, described in words. Can you generate 5 questions regarding the content of the screenshot as well as the corresponding short answers to them? The answer should be as short as possible, containing only the necessary information. Your answer should be structured as follows:
questions: [
{{question: the question,
 answer: the answer
}}, ...]
{THE SCREEN SCHEMA})BODY";

const char* k_screen_navigation_body = R"BODY(You only speak JSON. Do not write text that isn't JSON. You are given a mobile screenshot, described in words. Each UI element has a class, which is expressed in capital letter. The class is sometimes followed by a description, and then 4 numbers between 0 and 999 represent the quantized coordinates of each element.
Generate {num_samples} single-step navigation instructions and their corresponding answers based on the screenshot. Each answer should always start with `click`, followed by the coordinates of the element to click on, e.g. `click 0 137 31 113`.
Be creative with the questions, do not always use the same wording, refer to the UI elements only indirectly, and use imperative tense. Your answer should be structured as in the example below:

"questions": [
{{"question": "the question",
  "answer": "click 0 137 31 113"
}},
...
]
{THE SCREEN SCHEMA})BODY";

const char* k_screen_summarization_body = R"BODY(You only speak JSON. Do not write text that isn't JSON.
You are given the following mobile screenshot, described in words.
Generate a summary of the screenshot in 2-3 sentences. Do not focus on specifically naming the various UI elements, but instead, focus on the content. Your answer should be structured as follows:
"summary": the screen summary
{THE SCREEN SCHEMA})BODY";

const char* k_rephrase_single_body = R"BODY(List various ways to rephrase the answer. The answer should be as short as possible, without extra words from the question. Use all provided elements in each answer. Provide the output in square brackets.

Here is an example:
Question: 'What's the percentage of humidity?'
Answer elements: ['65%']
Full answer: 'The humidity is 65%.'
Rephrases: ['65%']

Here is another example:
Question: 'What is the gender?'
Answer elements: ['Male']
Full answer: 'The gender is male.'
Rephrases: ['male']

Here is another example:
Question: 'What is the status of "24 hr clock"?'
Answer elements: ['on']
Full answer: 'The status is "on".'
Rephrases: ['on', 'enabled']

[...]

Now is your turn.
Question: {THE QUESTION}
Answer elements: {THE UI ELEMENT DESCRIPTION}
Full answer: {THE FULL-SENTENCE ANSWER}
Rephrases:)BODY";

const char* k_rephrase_multiple_body = R"BODY(List various ways to rephrase the answer. The answer should be as short as possible, without extra words from the question. Use all provided elements in each answer. Provide the output in square brackets.

Here is an example:
Question: 'What's the temperature?'
Answer elements: ['59', '°F']
Full answer: 'The temperature is 59 degrees Fahrenheit.'
Rephrases: ['59°F', '59 Fahrenheits', '59 degrees Fahrenheit']

Here is another example:
Question: 'What is the name?'
Answer elements: ['Jon', 'Brown']
Full answer: 'The name is Jon Brown.'
Rephrases: ['Jon Brown']

Here is another example:
Question: 'What is the rest interval duration?'
Answer elements: ['00', ':', '34']
Full answer: 'The rest interval lasts 00:34.'
Rephrases: ['00:34', '34 seconds', '0 minutes and 34 seconds', '34 minutes', '0 hours and 34 minutes']

[...]

Now is your turn.
Question: {THE QUESTION}
Answer elements: {THE FIRST UI ELEMENT DESCRIPTION, ...}
Full answer: {THE FULL-SENTENCE ANSWER}
Rephrases:)BODY";

}  // namespace

const std::vector<PromptTemplate>& builtin_templates() {
    static const std::vector<PromptTemplate> templates = {
        PromptTemplate{"screen_qa", k_screen_qa_body, {"THE SCREEN SCHEMA"}},
        PromptTemplate{"screen_navigation", k_screen_navigation_body, {"num_samples", "THE SCREEN SCHEMA"}},
        PromptTemplate{"screen_summarization", k_screen_summarization_body, {"THE SCREEN SCHEMA"}},
        PromptTemplate{"rephrase_single", k_rephrase_single_body, {"THE QUESTION", "THE UI ELEMENT DESCRIPTION", "THE FULL-SENTENCE ANSWER"}},
        PromptTemplate{"rephrase_multiple", k_rephrase_multiple_body, {"THE QUESTION", "THE FIRST UI ELEMENT DESCRIPTION, ...", "THE FULL-SENTENCE ANSWER"}},
    };
    return templates;
}

const PromptTemplate& builtin_template(const std::string& name) {
    for (const auto& t : builtin_templates())
        if (t.name == name) return t;
    throw ValueError("unknown prompt template: " + name);
}

}  // namespace screenkit
